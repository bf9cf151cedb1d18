// Five slowly mixing VAR(1) chains started far apart: compare the locally
// and globally centered estimates of the long-run covariance.

#include <iomanip>
#include <iostream>

#include "mcgc/mcgc.hpp"

int main() {
    const auto proc = mcgc::benchmark_var_process();
    const auto chains = mcgc::simulate_var1(proc, 5, 2000, mcgc::var_dispersed_starts(proc, 5), 42);

    const auto w = mcgc::bartlett_window();
    const auto b = mcgc::BandwidthSpec::parse("cap").resolve(chains.n(), chains.p());
    const auto a = mcgc::asv(chains, w, b, mcgc::Path::fast);
    const auto g = mcgc::gsv(chains, w, b, mcgc::Path::fast);
    const auto truth = mcgc::make_oracle(proc);

    std::cout << std::setprecision(5);
    std::cout << "m=" << chains.m() << " n=" << chains.n() << " b_n=" << b.b_n << "\n\n";
    std::cout << "A-SV\n" << a.matrix << "\n\nG-SV\n" << g.matrix << "\n\ntrue Sigma\n" << truth.sigma << "\n\n";
    std::cout << "ESS (A-SV) " << mcgc::ess(chains, a).ess << '\n';
    std::cout << "ESS (G-SV) " << mcgc::ess(chains, g).ess << '\n';

    const mcgc::Vector mu = mcgc::Vector::Zero(2);
    std::cout << std::boolalpha;
    std::cout << "95% A-SV region covers the true mean: " << mcgc::wald_covers(mcgc::wald_region(chains, a), mu) << '\n';
    std::cout << "95% G-SV region covers the true mean: " << mcgc::wald_covers(mcgc::wald_region(chains, g), mu) << '\n';
}
