#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mcgc/errors.hpp"

namespace mcgc {

/// Triangular lag window: 1 - |x| on [-1, 1], zero outside.
inline double bartlett(double x) {
    const double a = std::abs(x);
    return a <= 1.0 ? 1.0 - a : 0.0;
}

/**
 * A lag window together with the constants that govern the asymptotic bias
 * and variance of the resulting spectral variance estimator.
 *
 * `q` and `k_q` satisfy (1 - w(x)) / |x|^q -> k_q as x -> 0, and
 * `w2_integral` is the integral of w^2 over the real line. `support_bound`
 * is the smallest B with w(x) = 0 for |x| >= B (infinity if none), and
 * `bound` is the constant c with |w| <= c.
 */
struct LagWindow {
    std::function<double(double)> weight;
    std::string name;
    double q = 1.0;
    double k_q = 1.0;
    double w2_integral = 0.0;
    double support_bound = std::numeric_limits<double>::infinity();
    double bound = 1.0;

    double operator()(double x) const { return weight(x); }
};

inline LagWindow bartlett_window() {
    return LagWindow{[](double x) { return bartlett(x); }, "bartlett", 1.0, 1.0, 2.0 / 3.0, 1.0, 1.0};
}

inline LagWindow window_by_name(const std::string& name) {
    if (name == "bartlett") return bartlett_window();
    throw InputError("unknown lag window '" + name + "'");
}

enum class BandwidthRule { explicit_value, sqrt_default };

struct Bandwidth {
    std::size_t b_n = 1;
    BandwidthRule rule = BandwidthRule::explicit_value;

    static Bandwidth of(std::size_t b) { return Bandwidth{b, BandwidthRule::explicit_value}; }
};

/// floor(sqrt(n)), computed exactly in integers.
inline Bandwidth default_bandwidth(std::size_t n) {
    if (n < 4) throw TooShort("default bandwidth needs n >= 4, got " + std::to_string(n));
    auto b = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (b * b > n) --b;
    while ((b + 1) * (b + 1) <= n) ++b;
    return Bandwidth{b, BandwidthRule::sqrt_default};
}

/// Lags 0..b_n-1 contribute; b_n may equal n (all lags of an n-length chain).
inline void check_bandwidth(const Bandwidth& b, std::size_t n) {
    if (b.b_n < 1 || b.b_n > n)
        throw BandwidthError("bandwidth " + std::to_string(b.b_n) + " outside [1, " + std::to_string(n) + "]");
}

/// w(k / b_n) for k = 0..len-1 (zero beyond the truncation point).
inline std::vector<double> lag_weights(const LagWindow& w, const Bandwidth& b, std::size_t len) {
    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < len && k < b.b_n; ++k)
        out[k] = w(static_cast<double>(k) / static_cast<double>(b.b_n));
    return out;
}

struct WindowCheck {
    std::string condition;
    bool passed = false;
    double value = 0.0;
};

struct WindowReport {
    std::vector<WindowCheck> checks;
    double w2_integral = std::numeric_limits<double>::quiet_NaN();
    double abs_integral = std::numeric_limits<double>::quiet_NaN();

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    bool passed(const std::string& condition) const {
        for (const auto& c : checks)
            if (c.condition == condition) return c.passed;
        return false;
    }
};

namespace detail {

/// Composite Simpson over [0, L] with spacing h (rounded to an even count).
template <class F>
double simpson_half_line(F&& f, double L, double h) {
    auto steps = static_cast<std::size_t>(std::ceil(L / h));
    if (steps % 2 == 1) ++steps;
    const double dx = L / static_cast<double>(steps);
    double sum = f(0.0) + f(L);
    for (std::size_t j = 1; j < steps; ++j) sum += f(static_cast<double>(j) * dx) * (j % 2 == 1 ? 4.0 : 2.0);
    return sum * dx / 3.0;
}

}  // namespace detail

/**
 * Numerically checks the standing lag-window conditions: w(0) = 1,
 * evenness, |w| <= c, and finite integrals of |w| and w^2.
 *
 * Integrals are taken over the declared support. For unbounded support the
 * integrals over [-L, L] and [-2L, 2L] (L = 64) must agree to 1e-6, which
 * catches windows that do not decay.
 */
inline WindowReport window_check(const LagWindow& w, double grid) {
    if (!(grid > 0.0)) throw InputError("window_check needs a positive grid spacing");
    WindowReport report;
    const double tol = 1e-12;

    const double w0 = w(0.0);
    report.checks.push_back({"w(0)=1", std::abs(w0 - 1.0) <= tol, w0});

    const bool finite_support = std::isfinite(w.support_bound);
    const double reach = finite_support ? w.support_bound * 1.5 : 64.0;
    double worst_asym = 0.0, worst_abs = 0.0;
    for (double x = 0.0; x <= reach; x += grid) {
        worst_asym = std::max(worst_asym, std::abs(w(x) - w(-x)));
        worst_abs = std::max({worst_abs, std::abs(w(x)), std::abs(w(-x))});
    }
    report.checks.push_back({"even", worst_asym <= tol, worst_asym});
    report.checks.push_back({"bounded", worst_abs <= w.bound + tol, worst_abs});

    auto abs_w = [&](double x) { return std::abs(w(x)); };
    auto sq_w = [&](double x) { const double v = w(x); return v * v; };
    if (finite_support) {
        // Symmetric window: integrate both half-lines separately so kinks at
        // zero and at the support edge sit on grid nodes.
        const double L = w.support_bound;
        report.abs_integral = detail::simpson_half_line(abs_w, L, grid) +
                              detail::simpson_half_line([&](double x) { return abs_w(-x); }, L, grid);
        report.w2_integral = detail::simpson_half_line(sq_w, L, grid) +
                             detail::simpson_half_line([&](double x) { return sq_w(-x); }, L, grid);
        report.checks.push_back({"integrable |w|", std::isfinite(report.abs_integral), report.abs_integral});
        report.checks.push_back({"integrable w^2", std::isfinite(report.w2_integral), report.w2_integral});
    } else {
        const double L = 64.0;
        auto both = [&](auto&& f, double len) {
            return detail::simpson_half_line(f, len, grid) + detail::simpson_half_line([&](double x) { return f(-x); }, len, grid);
        };
        const double a1 = both(abs_w, L), a2 = both(abs_w, 2.0 * L);
        const double s1 = both(sq_w, L), s2 = both(sq_w, 2.0 * L);
        report.abs_integral = a2;
        report.w2_integral = s2;
        report.checks.push_back({"integrable |w|", std::abs(a2 - a1) <= 1e-6 * std::max(1.0, a1), a2 - a1});
        report.checks.push_back({"integrable w^2", std::abs(s2 - s1) <= 1e-6 * std::max(1.0, s1), s2 - s1});
    }
    return report;
}

}  // namespace mcgc
