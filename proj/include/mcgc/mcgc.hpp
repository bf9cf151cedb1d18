#pragma once

#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"
#include "mcgc/chains.hpp"
#include "mcgc/acvf.hpp"
#include "mcgc/windows.hpp"
#include "mcgc/fft.hpp"
#include "mcgc/spectral.hpp"
#include "mcgc/ess.hpp"
#include "mcgc/rng.hpp"
#include "mcgc/models.hpp"
#include "mcgc/oracles.hpp"
#include "mcgc/samplers.hpp"
#include "mcgc/experiments.hpp"
