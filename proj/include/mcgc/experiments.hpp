#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcgc/acvf.hpp"
#include "mcgc/chains.hpp"
#include "mcgc/errors.hpp"
#include "mcgc/ess.hpp"
#include "mcgc/models.hpp"
#include "mcgc/oracles.hpp"
#include "mcgc/samplers.hpp"
#include "mcgc/spectral.hpp"
#include "mcgc/windows.hpp"

namespace mcgc {

/**
 * How b_n is chosen for a chain of length n with p components:
 * "sqrt" floor(sqrt n), an integer, "pow:v" floor(n^v), "frac:c" floor(c n),
 * or "cap" floor(n / (p + 1)).
 */
struct BandwidthSpec {
    enum class Kind { sqrt, fixed, power, fraction, cap };
    Kind kind = Kind::sqrt;
    double value = 0.0;

    static BandwidthSpec parse(const std::string& text) {
        auto number = [&](const std::string& s) {
            double v = 0.0;
            if (!detail::parse_double(s, v) || !(v > 0.0)) throw ConfigError("bad bandwidth '" + text + "'");
            return v;
        };
        if (text == "sqrt") return {Kind::sqrt, 0.0};
        if (text == "cap") return {Kind::cap, 0.0};
        if (text.rfind("pow:", 0) == 0) return {Kind::power, number(text.substr(4))};
        if (text.rfind("frac:", 0) == 0) return {Kind::fraction, number(text.substr(5))};
        long long b = 0;
        if (!detail::parse_long(text, b) || b < 1) throw ConfigError("bad bandwidth '" + text + "'");
        return {Kind::fixed, static_cast<double>(b)};
    }

    std::string str() const {
        std::ostringstream s;
        switch (kind) {
            case Kind::sqrt: return "sqrt";
            case Kind::cap: return "cap";
            case Kind::fixed: s << static_cast<long long>(value); return s.str();
            case Kind::power: s << "pow:" << value; return s.str();
            case Kind::fraction: s << "frac:" << value; return s.str();
        }
        return "?";
    }

    Bandwidth resolve(std::size_t n, std::size_t p) const {
        const double dn = static_cast<double>(n);
        std::size_t b = 0;
        switch (kind) {
            case Kind::sqrt: return default_bandwidth(n);
            case Kind::fixed: {
                const Bandwidth fixed = Bandwidth::of(static_cast<std::size_t>(value));
                check_bandwidth(fixed, n);
                return fixed;
            }
            case Kind::power: b = static_cast<std::size_t>(std::floor(std::pow(dn, value) + 1e-9)); break;
            case Kind::fraction: b = static_cast<std::size_t>(std::floor(value * dn)); break;
            case Kind::cap: b = n / (p + 1); break;
        }
        b = std::clamp<std::size_t>(b, 1, n - 1);
        return Bandwidth::of(b);
    }
};

enum class ModelKind { var1, mixture, boomerang };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::var1: return "var1";
        case ModelKind::mixture: return "mixture";
        case ModelKind::boomerang: return "boomerang";
    }
    return "?";
}

inline ModelKind model_by_name(const std::string& s) {
    if (s == "var1") return ModelKind::var1;
    if (s == "mixture") return ModelKind::mixture;
    if (s == "boomerang") return ModelKind::boomerang;
    throw ConfigError("unknown model '" + s + "'");
}

struct ModelConfig {
    ModelKind kind = ModelKind::var1;
    VarProcess var = benchmark_var_process();
    MixtureTarget mixture;
    BoomerangTarget boomerang = BoomerangTarget::setting1();
    std::string starts = "preset";  // preset | axis (var1 only) | custom
    std::vector<Vector> custom_starts;

    std::size_t p() const {
        switch (kind) {
            case ModelKind::var1: return var.p();
            case ModelKind::mixture: return 1;
            case ModelKind::boomerang: return 2;
        }
        return 0;
    }

    std::vector<Vector> start_points(std::size_t m) const {
        if (starts == "custom") {
            if (custom_starts.size() != m) throw ConfigError("custom starts must list one point per chain");
            return custom_starts;
        }
        switch (kind) {
            case ModelKind::var1: return starts == "axis" ? var_axis_starts(var, m) : var_dispersed_starts(var, m);
            case ModelKind::boomerang: return boomerang_starts(m);
            case ModelKind::mixture: {
                std::vector<Vector> out;
                for (double x : mixture_starts(mixture, m)) out.push_back(Vector::Constant(1, x));
                return out;
            }
        }
        return {};
    }

    ChainSet simulate(std::size_t m, std::size_t n, std::uint64_t seed) const {
        const auto starts_m = start_points(m);
        switch (kind) {
            case ModelKind::var1: return simulate_var1(var, m, n, starts_m, seed);
            case ModelKind::boomerang: return gibbs_boomerang(boomerang, m, n, starts_m, seed);
            case ModelKind::mixture: {
                std::vector<double> xs;
                for (const auto& v : starts_m) xs.push_back(v(0));
                return rwm_mixture(mixture, m, n, xs, seed);
            }
        }
        throw ConfigError("unknown model");
    }

    /// The exact target mean where one is available.
    Vector true_mean() const {
        switch (kind) {
            case ModelKind::var1: return Vector::Zero(static_cast<Eigen::Index>(var.p()));
            case ModelKind::mixture: return Vector::Constant(1, mixture.mean());
            case ModelKind::boomerang: {
                const auto mom = boomerang_mean(boomerang);
                return Eigen::Vector2d(mom.mean[0], mom.mean[1]);
            }
        }
        return {};
    }
};

struct ExperimentConfig {
    ModelConfig model;
    std::size_t m = 5;
    std::vector<std::size_t> n_grid{1000};
    std::size_t replications = 300;
    std::uint64_t seed = 0;
    std::vector<Estimator> estimators{Estimator::asv, Estimator::gsv};
    BandwidthSpec bandwidth;
    std::string window = "bartlett";
    double level = 0.95;
    std::size_t max_lag = 0;  // 0: default_max_lag(n)
    std::size_t threads = 0;  // 0: hardware concurrency
    std::string output_dir = ".";

    void validate() const {
        if (m < 1) throw ConfigError("m must be at least 1");
        if (replications < 1) throw ConfigError("replications must be at least 1");
        if (n_grid.empty()) throw ConfigError("n grid is empty");
        for (std::size_t j = 0; j < n_grid.size(); ++j) {
            if (n_grid[j] < 4) throw ConfigError("every n must be at least 4");
            if (j > 0 && n_grid[j] <= n_grid[j - 1]) throw ConfigError("n grid must be strictly increasing");
        }
        if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
        if (estimators.empty()) throw ConfigError("no estimators selected");
        window_by_name(window);
        switch (model.kind) {
            case ModelKind::var1: model.var.validate(); break;
            case ModelKind::mixture: model.mixture.validate(); break;
            case ModelKind::boomerang: model.boomerang.validate(); break;
        }
    }

    std::size_t n_max() const { return n_grid.back(); }
};

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
    const auto rows = j.size(), cols = j[0].size();
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw ConfigError("matrix rows have unequal lengths");
        for (std::size_t c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return out;
}

}  // namespace detail

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

/**
 * Reads an experiment description. Recognized keys: model, m, n (number or
 * array), replications, seed, estimators, bandwidth, window, level,
 * max_lag, threads, output, starts, and the model blocks
 * `var1: {phi, omega}`, `mixture: {proposal_sd}`,
 * `boomerang: {A, B, C} | {setting: 1|2}`.
 */
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg = {}) {
    try {
        if (j.contains("model")) cfg.model.kind = model_by_name(j.at("model").get<std::string>());
        if (j.contains("m")) cfg.m = j.at("m").get<std::size_t>();
        if (j.contains("n")) {
            const auto& n = j.at("n");
            cfg.n_grid = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>{n.get<std::size_t>()};
        }
        if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("estimators")) {
            cfg.estimators.clear();
            for (const auto& e : j.at("estimators")) cfg.estimators.push_back(estimator_by_name(e.get<std::string>()));
        }
        if (j.contains("bandwidth")) {
            const auto& b = j.at("bandwidth");
            cfg.bandwidth = BandwidthSpec::parse(b.is_string() ? b.get<std::string>() : std::to_string(b.get<long long>()));
        }
        if (j.contains("window")) cfg.window = j.at("window").get<std::string>();
        if (j.contains("level")) cfg.level = j.at("level").get<double>();
        if (j.contains("max_lag")) cfg.max_lag = j.at("max_lag").get<std::size_t>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<std::size_t>();
        if (j.contains("output")) cfg.output_dir = j.at("output").get<std::string>();
        if (j.contains("starts")) {
            const auto& s = j.at("starts");
            if (s.is_string()) {
                cfg.model.starts = s.get<std::string>();
            } else {
                cfg.model.starts = "custom";
                cfg.model.custom_starts.clear();
                for (const auto& pt : s) {
                    const auto v = pt.get<std::vector<double>>();
                    cfg.model.custom_starts.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
                }
            }
        }
        if (j.contains("var1")) {
            const auto& v = j.at("var1");
            if (v.contains("phi")) cfg.model.var.phi = detail::matrix_from_json(v.at("phi"));
            if (v.contains("omega")) cfg.model.var.omega = detail::matrix_from_json(v.at("omega"));
        }
        if (j.contains("mixture") && j.at("mixture").contains("proposal_sd"))
            cfg.model.mixture.proposal_sd = j.at("mixture").at("proposal_sd").get<double>();
        if (j.contains("boomerang")) {
            const auto& b = j.at("boomerang");
            if (b.contains("setting")) {
                const int s = b.at("setting").get<int>();
                if (s != 1 && s != 2) throw ConfigError("boomerang setting must be 1 or 2");
                cfg.model.boomerang = s == 1 ? BoomerangTarget::setting1() : BoomerangTarget::setting2();
            }
            if (b.contains("A")) cfg.model.boomerang.A = b.at("A").get<double>();
            if (b.contains("B")) cfg.model.boomerang.B = b.at("B").get<double>();
            if (b.contains("C")) cfg.model.boomerang.C = b.at("C").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    return cfg;
}

/// Runs body(r) for r in [0, count) on up to `threads` workers; results are
/// written by index, so the output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t r = w; r < count; r += threads) body(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Per-replication seed: seed + r.
inline std::uint64_t replication_seed(const ExperimentConfig& cfg, std::size_t r) { return cfg.seed + r; }

/// Per-chain local and global ACF rows, chain-averaged rows (chain 0) and,
/// when an oracle is given, its exact ACF with centering "oracle".
inline std::vector<AcfRow> acf_rows(const ChainSet& c, std::size_t max_lag, const std::optional<OracleVar>& oracle = std::nullopt) {
    std::vector<AcfRow> rows;
    auto emit = [&](std::size_t chain, std::size_t i, const char* centering, const Vector& v) {
        for (Eigen::Index k = 0; k < v.size(); ++k) rows.push_back({static_cast<std::size_t>(k), chain, i + 1, centering, v(k)});
    };
    for (std::size_t i = 0; i < c.p(); ++i) {
        Vector local_sum = Vector::Zero(static_cast<Eigen::Index>(max_lag + 1));
        for (std::size_t s = 0; s < c.m(); ++s) {
            const Vector local = acf(c, s, i, max_lag, Centering::local);
            local_sum += local;
            emit(s + 1, i, "local", local);
            emit(s + 1, i, "global", acf(c, s, i, max_lag, Centering::global));
        }
        emit(0, i, "local", local_sum / static_cast<double>(c.m()));
        emit(0, i, "global", averaged_global_acf(c, i, max_lag));
        if (oracle) {
            Vector exact(static_cast<Eigen::Index>(max_lag + 1));
            for (std::size_t k = 0; k <= max_lag; ++k) exact(static_cast<Eigen::Index>(k)) = oracle->acf(i, static_cast<long>(k));
            emit(0, i, "oracle", exact);
        }
    }
    return rows;
}

/**
 * ACF plot data at the largest n of the grid: per-chain local and global
 * ACFs, chain averages (chain id 0) of both, and the oracle ACF for VAR(1).
 */
inline std::vector<AcfRow> run_acf(const ExperimentConfig& cfg) {
    cfg.validate();
    const ChainSet chains = cfg.model.simulate(cfg.m, cfg.n_max(), cfg.seed);
    return acf_rows(chains, cfg.max_lag == 0 ? default_max_lag(chains.n()) : cfg.max_lag,
                    cfg.model.kind == ModelKind::var1 ? std::optional<OracleVar>(make_oracle(cfg.model.var)) : std::nullopt);
}

struct CoverageRow {
    std::size_t n = 0;
    std::size_t m = 0;
    Estimator estimator = Estimator::gsv;
    std::size_t b_n = 0;
    double coverage = 0.0;
    std::size_t used = 0;        // replications in the denominator
    std::size_t indefinite = 0;  // replications with a non-PD estimate
    double se = 0.0;             // sqrt(c (1 - c) / used)
};

struct CoverageTable {
    std::vector<CoverageRow> rows;

    const CoverageRow& at(std::size_t n, Estimator e) const {
        for (const auto& r : rows)
            if (r.n == n && r.estimator == e) return r;
        throw IndexError("no coverage row for n=" + std::to_string(n));
    }
};

/**
 * Empirical coverage of the Wald region for each (n, estimator). Each
 * replication simulates one run of the largest n and evaluates prefixes.
 */
inline CoverageTable run_coverage(const ExperimentConfig& cfg) {
    cfg.validate();
    const Vector mu = cfg.model.true_mean();
    const LagWindow w = window_by_name(cfg.window);
    const std::size_t G = cfg.n_grid.size(), E = cfg.estimators.size();
    // outcome: 1 covered, 0 not covered, -1 indefinite
    std::vector<int> outcome(cfg.replications * G * E, 0);
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
        const ChainSet full = cfg.model.simulate(cfg.m, cfg.n_max(), replication_seed(cfg, r));
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t n = cfg.n_grid[g];
            const ChainSet chains = n == full.n() ? full : full.prefix(n);
            const Bandwidth b = cfg.bandwidth.resolve(n, chains.p());
            for (std::size_t e = 0; e < E; ++e) {
                const SvEstimate sigma = estimate_sigma(chains, cfg.estimators[e], w, b, select_path(n));
                int& slot = outcome[(r * G + g) * E + e];
                if (!sigma.positive_definite()) {
                    slot = -1;
                    continue;
                }
                slot = wald_covers(wald_region(chains, sigma, cfg.level), mu) ? 1 : 0;
            }
        }
    });

    CoverageTable table;
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t e = 0; e < E; ++e) {
            CoverageRow row;
            row.n = cfg.n_grid[g];
            row.m = cfg.m;
            row.estimator = cfg.estimators[e];
            row.b_n = cfg.bandwidth.resolve(row.n, cfg.model.p()).b_n;
            std::size_t covered = 0;
            for (std::size_t r = 0; r < cfg.replications; ++r) {
                const int o = outcome[(r * G + g) * E + e];
                if (o < 0) ++row.indefinite;
                else { ++row.used; covered += static_cast<std::size_t>(o); }
            }
            row.coverage = row.used > 0 ? static_cast<double>(covered) / static_cast<double>(row.used) : 0.0;
            row.se = row.used > 0 ? std::sqrt(row.coverage * (1.0 - row.coverage) / static_cast<double>(row.used)) : 0.0;
            table.rows.push_back(row);
        }
    return table;
}

inline void write_coverage_csv(const CoverageTable& t, std::ostream& out) {
    out << "n,m,estimator,b_n,coverage,replications,se,indefinite\n" << std::setprecision(10);
    for (const auto& r : t.rows)
        out << r.n << ',' << r.m << ',' << to_string(r.estimator) << ',' << r.b_n << ',' << r.coverage << ',' << r.used << ','
            << r.se << ',' << r.indefinite << '\n';
}

struct RunningRow {
    std::size_t n = 0;
    std::size_t replication = 0;
    Estimator estimator = Estimator::gsv;
    double log_frobenius = 0.0;
    double log_ess_per_mn = 0.0;  // NaN when the estimate is not positive definite
};

/// log ||Sigma-hat||_F and log(ESS/mn) at every n of the grid, from the
/// prefixes of one long run per replication.
inline std::vector<RunningRow> run_running_plots(const ExperimentConfig& cfg) {
    cfg.validate();
    const LagWindow w = window_by_name(cfg.window);
    const std::size_t G = cfg.n_grid.size(), E = cfg.estimators.size();
    std::vector<RunningRow> rows(cfg.replications * G * E);
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
        const ChainSet full = cfg.model.simulate(cfg.m, cfg.n_max(), replication_seed(cfg, r));
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t n = cfg.n_grid[g];
            const ChainSet chains = n == full.n() ? full : full.prefix(n);
            const Bandwidth b = cfg.bandwidth.resolve(n, chains.p());
            for (std::size_t e = 0; e < E; ++e) {
                const SvEstimate sigma = estimate_sigma(chains, cfg.estimators[e], w, b, select_path(n));
                RunningRow& row = rows[(r * G + g) * E + e];
                row.n = n;
                row.replication = r;
                row.estimator = cfg.estimators[e];
                row.log_frobenius = std::log(sigma.matrix.norm());
                try {
                    row.log_ess_per_mn = std::log(ess(chains, sigma).per_sample());
                } catch (const NumericalError&) {
                    row.log_ess_per_mn = std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
    });
    return rows;
}

inline void write_running_csv(const std::vector<RunningRow>& rows, std::ostream& out) {
    out << "n,replication,estimator,log_frobenius,log_ess_per_mn\n" << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.n << ',' << r.replication << ',' << to_string(r.estimator) << ',' << r.log_frobenius << ',';
        if (std::isnan(r.log_ess_per_mn)) out << "NA";
        else out << r.log_ess_per_mn;
        out << '\n';
    }
}

struct BenchmarkRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t b_n = 0;
    double naive_seconds = 0.0;
    double fast_seconds = 0.0;
    bool asserted = false;  // n >= 1e4 and b_n >= sqrt(n)
    bool passed = true;     // fast < naive whenever asserted

    double speedup() const { return naive_seconds / fast_seconds; }
};

template <class F>
double median_seconds(F&& f, int repeats) {
    std::vector<double> times;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

/// Median-of-`repeats` wall time of naive and fast G-SV on one simulated
/// data set per (n, bandwidth).
inline std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig& cfg, const std::vector<BandwidthSpec>& bandwidths,
                                               int repeats = 5) {
    cfg.validate();
    const LagWindow w = window_by_name(cfg.window);
    std::vector<BenchmarkRow> rows;
    for (const std::size_t n : cfg.n_grid) {
        const ChainSet chains = cfg.model.simulate(cfg.m, n, cfg.seed);
        for (const auto& spec : bandwidths) {
            const Bandwidth b = spec.resolve(n, chains.p());
            BenchmarkRow row{n, chains.p(), b.b_n};
            row.naive_seconds = median_seconds([&] { (void)gsv(chains, w, b, Path::naive); }, repeats);
            row.fast_seconds = median_seconds([&] { (void)gsv(chains, w, b, Path::fast); }, repeats);
            row.asserted = n >= 10000 && b.b_n >= default_bandwidth(n).b_n;
            row.passed = !row.asserted || row.fast_seconds < row.naive_seconds;
            rows.push_back(row);
        }
    }
    return rows;
}

inline void write_benchmark_csv(const std::vector<BenchmarkRow>& rows, std::ostream& out) {
    out << "n,p,b_n,naive_seconds,fast_seconds,speedup,asserted,passed\n" << std::setprecision(6);
    for (const auto& r : rows)
        out << r.n << ',' << r.p << ',' << r.b_n << ',' << r.naive_seconds << ',' << r.fast_seconds << ',' << r.speedup() << ','
            << (r.asserted ? 1 : 0) << ',' << (r.passed ? 1 : 0) << '\n';
}

}  // namespace mcgc
