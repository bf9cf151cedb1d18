#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcgc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or configuration (CLI exit code 2).
class InputError : public Error {
public:
    using Error::Error;
};

/// A computation could not produce a meaningful result (CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

// chains
class RaggedInput : public InputError { public: using InputError::InputError; };
class SchemaError : public InputError { public: using InputError::InputError; };
class IndexError  : public InputError { public: using InputError::InputError; };

class BadValue : public InputError {
public:
    BadValue(std::size_t row, const std::string& what)
        : InputError("non-finite or unparsable value at row " + std::to_string(row) + ": " + what),
          row_(row) {}
    /// 1-based data row (header excluded).
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// acvf / windows / spectral
class LagTooLarge        : public InputError { public: using InputError::InputError; };
class TooShort           : public InputError { public: using InputError::InputError; };
class BandwidthError     : public InputError { public: using InputError::InputError; };
class ShapeError         : public InputError { public: using InputError::InputError; };
class DegenerateVariance : public NumericalError { public: using NumericalError::NumericalError; };

// ess
class IndefiniteSigma    : public NumericalError { public: using NumericalError::NumericalError; };
class DegenerateLag0     : public NumericalError { public: using NumericalError::NumericalError; };
class SingularCovariance : public NumericalError { public: using NumericalError::NumericalError; };

// samplers / oracles
class Unstable        : public InputError { public: using InputError::InputError; };
class IllConditioned  : public NumericalError { public: using NumericalError::NumericalError; };
class TailError       : public NumericalError { public: using NumericalError::NumericalError; };
class QuadratureError : public NumericalError { public: using NumericalError::NumericalError; };

// experiment harness
class ConfigError : public InputError { public: using InputError::InputError; };

}  // namespace mcgc
