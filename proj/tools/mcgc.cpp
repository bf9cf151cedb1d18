// mcgc: simulate chains, estimate ACFs and long-run covariances, and run the
// replication experiments. Exit codes: 0 ok, 2 bad input or config, 3
// numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mcgc/mcgc.hpp"

namespace {

using nlohmann::json;

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

json scalar_from_text(const std::string& text) {
    if (!text.empty() && text.front() == '[') {
        auto parsed = json::parse(text, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    if (text == "true") return true;
    if (text == "false") return false;
    long long i = 0;
    if (mcgc::detail::parse_long(text, i)) return i;
    double d = 0.0;
    if (mcgc::detail::parse_double(text, d)) return d;
    return text;
}

// TOML goes through CLI11's reader; sections become nested objects and the
// rows of a nested array arrive as text, which is parsed as JSON.
json read_toml(std::istream& in) {
    json out = json::object();
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        json* node = &out;
        for (const auto& parent : item.parents)
            if (parent != "default") node = &(*node)[parent];
        // CLI11 strips the outer brackets, so a one-row nested array arrives as "[...]".
        if (item.inputs.size() == 1 && item.inputs.front().rfind('[', 0) != 0) {
            (*node)[item.name] = scalar_from_text(item.inputs.front());
        } else {
            json arr = json::array();
            for (const auto& v : item.inputs) arr.push_back(scalar_from_text(v));
            (*node)[item.name] = std::move(arr);
        }
    }
    return out;
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mcgc::ConfigError("cannot open config file " + path);
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".json") {
        try {
            return json::parse(in);
        } catch (const json::exception& e) {
            throw mcgc::ConfigError("invalid JSON in " + path + ": " + e.what());
        }
    }
    if (ext == ".toml") return read_toml(in);
    throw mcgc::ConfigError("config file must end in .json or .toml: " + path);
}

std::vector<mcgc::Vector> read_starts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mcgc::ConfigError("cannot open starts file " + path);
    std::vector<mcgc::Vector> out;
    std::string line;
    while (std::getline(in, line)) {
        if (mcgc::detail::trim(line).empty() || line.front() == '#') continue;
        std::vector<double> values;
        for (auto field : mcgc::detail::split_csv(line)) {
            double v = 0.0;
            if (!mcgc::detail::parse_double(field, v)) throw mcgc::ConfigError("bad number in starts file: " + line);
            values.push_back(v);
        }
        out.push_back(Eigen::Map<const mcgc::Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    return out;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw mcgc::ConfigError("cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// Options shared by every experiment subcommand. Flags land in `overrides`,
// which is merged over the config file.
struct ExperimentArgs {
    std::string config_path;
    json overrides = json::object();
    std::string starts;
    std::string output;

    void attach(CLI::App* app, bool require_seed) {
        app->add_option("-c,--config", config_path, "TOML or JSON experiment config")->check(CLI::ExistingFile);
        auto* seed = app->add_option_function<std::uint64_t>("--seed", [this](std::uint64_t v) { overrides["seed"] = v; },
                                                             "Base seed (replication r uses seed + r)");
        if (require_seed) seed->required();
        app->add_option_function<std::string>("--model", [this](const std::string& v) { overrides["model"] = v; },
                                              "var1, mixture or boomerang");
        app->add_option_function<std::size_t>("--m", [this](std::size_t v) { overrides["m"] = v; }, "Number of chains");
        app->add_option_function<std::vector<std::size_t>>("--n", [this](const std::vector<std::size_t>& v) { overrides["n"] = v; },
                                                           "Chain length, or an increasing grid");
        app->add_option_function<std::size_t>("--replications", [this](std::size_t v) { overrides["replications"] = v; });
        app->add_option_function<std::string>("--bandwidth", [this](const std::string& v) { overrides["bandwidth"] = v; },
                                              "sqrt, an integer, pow:v, frac:c or cap");
        app->add_option_function<std::string>("--window", [this](const std::string& v) { overrides["window"] = v; });
        app->add_option_function<std::vector<std::string>>(
            "--estimators", [this](const std::vector<std::string>& v) { overrides["estimators"] = v; }, "asv and/or gsv");
        app->add_option_function<double>("--level", [this](double v) { overrides["level"] = v; });
        app->add_option_function<std::size_t>("--max-lag", [this](std::size_t v) { overrides["max_lag"] = v; });
        app->add_option_function<std::size_t>("--threads", [this](std::size_t v) { overrides["threads"] = v; });
        app->add_option_function<int>("--boomerang-setting", [this](int v) { overrides["boomerang"]["setting"] = v; });
        app->add_option_function<double>("--proposal-sd", [this](double v) { overrides["mixture"]["proposal_sd"] = v; });
        app->add_option("--starts", starts, "Start points: preset, axis, or a file with one comma-separated point per line");
        app->add_option("-o,--output", output, "Output file (default stdout)");
    }

    mcgc::ExperimentConfig resolve() const {
        json merged = config_path.empty() ? json::object() : read_config_file(config_path);
        merged.merge_patch(overrides);
        auto cfg = mcgc::config_from_json(merged);
        if (!starts.empty()) {
            if (starts == "preset" || starts == "axis") {
                cfg.model.starts = starts;
            } else {
                cfg.model.starts = "custom";
                cfg.model.custom_starts = read_starts_file(starts);
            }
        }
        cfg.validate();
        return cfg;
    }
};

// Options for subcommands that read an existing chain file.
struct InputArgs {
    std::string input;
    std::string estimator = "gsv";
    std::string path = "auto";
    std::string window = "bartlett";
    std::string bandwidth = "sqrt";
    std::string output;

    void attach(CLI::App* app) {
        app->add_option("-i,--input", input, "Chain CSV (chain,iter,y1..yp) or JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--estimator", estimator, "asv or gsv")->check(CLI::IsMember({"asv", "gsv"}));
        app->add_option("--path", path, "naive, fast or auto")->check(CLI::IsMember({"naive", "fast", "auto"}));
        app->add_option("--window", window);
        app->add_option("--bandwidth", bandwidth, "sqrt, an integer, pow:v, frac:c or cap");
        app->add_option("-o,--output", output, "Output file (default stdout)");
    }

    mcgc::SvEstimate estimate(const mcgc::ChainSet& chains) const {
        const auto w = mcgc::window_by_name(window);
        const auto b = mcgc::BandwidthSpec::parse(bandwidth).resolve(chains.n(), chains.p());
        const auto p = path == "auto" ? mcgc::select_path(chains.n()) : mcgc::path_by_name(path);
        return mcgc::estimate_sigma(chains, mcgc::estimator_by_name(estimator), w, b, p);
    }
};

json sv_json(const mcgc::SvEstimate& sv) {
    return {{"estimator", mcgc::to_string(sv.estimator)},
            {"path", mcgc::to_string(sv.path)},
            {"window", sv.window},
            {"b_n", sv.b_n},
            {"matrix", mcgc::matrix_to_json(sv.matrix)},
            {"min_eigenvalue", sv.min_eigenvalue()},
            {"positive_definite", sv.positive_definite()}};
}

json oracle_json(const mcgc::ExperimentConfig& cfg) {
    const std::size_t max_lag = cfg.max_lag == 0 ? 10 : cfg.max_lag;
    switch (cfg.model.kind) {
        case mcgc::ModelKind::var1: {
            const auto o = mcgc::make_oracle(cfg.model.var);
            json gammas = json::array();
            for (std::size_t k = 0; k <= max_lag; ++k) gammas.push_back(mcgc::matrix_to_json(o.acvf(static_cast<long>(k))));
            return {{"model", "var1"},
                    {"phi", mcgc::matrix_to_json(o.phi)},
                    {"omega", mcgc::matrix_to_json(o.omega)},
                    {"psi", mcgc::matrix_to_json(o.psi)},
                    {"gamma", gammas},
                    {"sigma", mcgc::matrix_to_json(o.sigma)},
                    {"phi1", mcgc::matrix_to_json(o.phi1)},
                    {"sigma_tail_bound", o.sigma_tail},
                    {"phi1_tail_bound", o.phi1_tail},
                    {"lags", o.lags},
                    {"lyapunov_residual", o.lyapunov_residual()}};
        }
        case mcgc::ModelKind::mixture:
            return {{"model", "mixture"}, {"mean", cfg.model.mixture.mean()}, {"mass_above_zero", cfg.model.mixture.mass_above_zero()}};
        case mcgc::ModelKind::boomerang: {
            const auto t = cfg.model.boomerang;
            const auto mom = mcgc::boomerang_mean(t);
            return {{"model", "boomerang"},
                    {"A", t.A}, {"B", t.B}, {"C", t.C},
                    {"mean", {mom.mean[0], mom.mean[1]}},
                    {"log_normalizer", mom.log_normalizer}};
        }
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-chain MCMC output analysis: G-ACF, spectral variance, ESS and coverage experiments"};
    app.require_subcommand(1);

    ExperimentArgs sim_args, acf_args, cov_args, run_args, bench_args, oracle_args;
    InputArgs sv_args, ess_args;
    std::string acf_input;
    std::vector<std::string> bench_bandwidths{"sqrt", "frac:0.5"};
    int bench_repeats = 5;

    auto* simulate = app.add_subcommand("simulate", "Simulate m chains and write chain CSV");
    sim_args.attach(simulate, true);
    auto* acf = app.add_subcommand("acf", "Local, global and oracle ACF rows as CSV");
    acf_args.attach(acf, false);
    acf->add_option("-i,--input", acf_input, "Use an existing chain file instead of simulating")->check(CLI::ExistingFile);
    auto* sv = app.add_subcommand("sv", "A-SV or G-SV estimate of the long-run covariance as JSON");
    sv_args.attach(sv);
    auto* ess = app.add_subcommand("ess", "Multivariate effective sample size as JSON");
    ess_args.attach(ess);
    auto* coverage = app.add_subcommand("coverage", "Wald-region coverage over replications as CSV");
    cov_args.attach(coverage, true);
    auto* running = app.add_subcommand("running", "Running log-Frobenius and log ESS/mn as CSV");
    run_args.attach(running, true);
    auto* bench = app.add_subcommand("bench", "Naive vs fast G-SV timings as CSV");
    bench_args.attach(bench, true);
    bench->add_option("--bandwidths", bench_bandwidths, "Bandwidth rules to time");
    bench->add_option("--repeats", bench_repeats, "Timings per cell (median is reported)")->check(CLI::PositiveNumber);
    auto* oracle = app.add_subcommand("oracle", "Exact model quantities as JSON");
    oracle_args.attach(oracle, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (simulate->parsed()) {
            const auto cfg = sim_args.resolve();
            const auto chains = cfg.model.simulate(cfg.m, cfg.n_max(), cfg.seed);
            Output out(sim_args.output);
            mcgc::save_chains_csv(chains, out.stream());
        } else if (acf->parsed()) {
            Output out(acf_args.output);
            if (!acf_input.empty()) {
                const auto chains = mcgc::load_chains(acf_input);
                const auto& ov = acf_args.overrides;
                const std::size_t max_lag = ov.contains("max_lag") ? ov["max_lag"].get<std::size_t>() : mcgc::default_max_lag(chains.n());
                mcgc::write_acf_csv(mcgc::acf_rows(chains, max_lag), out.stream());
            } else {
                if (!acf_args.overrides.contains("seed")) throw mcgc::ConfigError("--seed is required when simulating");
                mcgc::write_acf_csv(mcgc::run_acf(acf_args.resolve()), out.stream());
            }
        } else if (sv->parsed()) {
            const auto chains = mcgc::load_chains(sv_args.input);
            Output out(sv_args.output);
            out.stream() << sv_json(sv_args.estimate(chains)).dump(2) << '\n';
        } else if (ess->parsed()) {
            const auto chains = mcgc::load_chains(ess_args.input);
            const auto sigma = ess_args.estimate(chains);
            const auto r = mcgc::ess(chains, sigma);
            Output out(ess_args.output);
            out.stream() << json{{"estimator", mcgc::to_string(sigma.estimator)},
                                 {"ess", r.ess},
                                 {"ess_per_mn", r.per_sample()},
                                 {"b_n", sigma.b_n},
                                 {"m", chains.m()},
                                 {"n", chains.n()}}
                                .dump(2)
                         << '\n';
        } else if (coverage->parsed()) {
            const auto table = mcgc::run_coverage(cov_args.resolve());
            Output out(cov_args.output);
            mcgc::write_coverage_csv(table, out.stream());
        } else if (running->parsed()) {
            const auto rows = mcgc::run_running_plots(run_args.resolve());
            Output out(run_args.output);
            mcgc::write_running_csv(rows, out.stream());
        } else if (bench->parsed()) {
            std::vector<mcgc::BandwidthSpec> specs;
            for (const auto& b : bench_bandwidths) specs.push_back(mcgc::BandwidthSpec::parse(b));
            const auto rows = mcgc::run_benchmark(bench_args.resolve(), specs, bench_repeats);
            Output out(bench_args.output);
            mcgc::write_benchmark_csv(rows, out.stream());
        } else if (oracle->parsed()) {
            const auto cfg = oracle_args.resolve();
            Output out(oracle_args.output);
            out.stream() << oracle_json(cfg).dump(2) << '\n';
        }
    } catch (const mcgc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const mcgc::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
