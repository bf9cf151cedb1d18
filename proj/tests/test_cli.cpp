#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(MCGC_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mcgc_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("help and bad usage", "[cli]") {
    CHECK(run("--help").code == 0);
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("seed is mandatory for experiments", "[cli]") {
    CHECK(run("simulate --n 50").code == 2);
    CHECK(run("coverage --n 50 --replications 2").code == 2);
    CHECK(run("acf --n 50").code == 2);
}

TEST_CASE("simulate then estimate", "[cli]") {
    const fs::path chains = scratch("chains.csv");
    const Result sim = run("simulate --seed 7 --m 3 --n 400 -o " + chains.string());
    REQUIRE(sim.code == 0);
    REQUIRE(fs::exists(chains));

    const Result again = run("simulate --seed 7 --m 3 --n 400");
    std::ifstream in(chains);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(again.out == text.str());

    const Result sv = run("sv -i " + chains.string() + " --estimator gsv --path naive");
    REQUIRE(sv.code == 0);
    const json j = json::parse(sv.out);
    CHECK(j["estimator"] == "gsv");
    CHECK(j["b_n"] == 20);
    CHECK(j["matrix"].size() == 2);
    const Result fast = run("sv -i " + chains.string() + " --estimator gsv --path fast");
    const json jf = json::parse(fast.out);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double x = j["matrix"][a][b], y = jf["matrix"][a][b];
            CHECK(std::abs(x - y) <= 1e-8 * std::max(1.0, std::abs(x)));
        }

    const Result e = run("ess -i " + chains.string());
    REQUIRE(e.code == 0);
    const json je = json::parse(e.out);
    CHECK(je["m"] == 3);
    CHECK(je["n"] == 400);
    CHECK(je["ess"].get<double>() > 0.0);

    CHECK(run("sv -i " + chains.string() + " --bandwidth 400000").code == 2);
}

TEST_CASE("input errors and numerical failures", "[cli]") {
    const fs::path ragged = scratch("ragged.csv");
    write_file(ragged, "chain,iter,y1\n1,1,0.5\n1,2,abc\n");
    CHECK(run("sv -i " + ragged.string()).code == 2);

    const fs::path flat = scratch("flat.csv");
    std::string text = "chain,iter,y1\n";
    for (int t = 1; t <= 20; ++t) text += "1," + std::to_string(t) + ",3\n";
    write_file(flat, text);
    CHECK(run("ess -i " + flat.string()).code == 3);
}

TEST_CASE("config files with flag overrides", "[cli]") {
    const fs::path toml = scratch("cfg.toml");
    write_file(toml, "model = \"var1\"\nm = 2\nn = 300\nseed = 11\n[var1]\nphi = [[0.5]]\nomega = [[1.0]]\n");
    const Result a = run("simulate -c " + toml.string() + " --seed 11");
    REQUIRE(a.code == 0);
    CHECK(a.out.rfind("chain,iter,y1\n", 0) == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 1 + 2 * 300);

    const fs::path js = scratch("cfg.json");
    write_file(js, R"({"model": "mixture", "m": 2, "n": 100})");
    const Result b = run("simulate -c " + js.string() + " --seed 3 --n 50");
    REQUIRE(b.code == 0);
    CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 1 + 2 * 50);

    const fs::path broken = scratch("broken.json");
    write_file(broken, "{\"m\": ");
    CHECK(run("simulate -c " + broken.string() + " --seed 1").code == 2);
    const fs::path yaml = scratch("cfg.yaml");
    write_file(yaml, "m: 2\n");
    CHECK(run("simulate -c " + yaml.string() + " --seed 1").code == 2);
    CHECK(run("simulate --seed 1 --model ising").code == 2);
}

TEST_CASE("experiment subcommands", "[cli]") {
    const Result cov = run("coverage --seed 2 --model boomerang --m 2 --n 200 400 --replications 4");
    REQUIRE(cov.code == 0);
    CHECK(cov.out.rfind("n,m,estimator,b_n,coverage,replications,se,indefinite\n", 0) == 0);
    CHECK(std::count(cov.out.begin(), cov.out.end(), '\n') == 5);
    CHECK(run("coverage --seed 2 --n 400 200 --replications 4").code == 2);

    const Result running = run("running --seed 2 --m 2 --n 100 200 --replications 2 --estimators gsv");
    REQUIRE(running.code == 0);
    CHECK(std::count(running.out.begin(), running.out.end(), '\n') == 5);

    const Result acf = run("acf --seed 2 --m 2 --n 200 --max-lag 5");
    REQUIRE(acf.code == 0);
    CHECK(acf.out.find("oracle") != std::string::npos);

    const Result bench = run("bench --seed 1 --m 1 --n 500 --repeats 1");
    REQUIRE(bench.code == 0);
    CHECK(bench.out.rfind("n,p,b_n,naive_seconds,fast_seconds", 0) == 0);
}

TEST_CASE("oracle output", "[cli]") {
    const Result var = run("oracle --model var1");
    REQUIRE(var.code == 0);
    const json j = json::parse(var.out);
    CHECK(j["sigma"].size() == 2);
    CHECK(j["gamma"].size() == 11);
    const Result boom = run("oracle --model boomerang --boomerang-setting 2");
    REQUIRE(boom.code == 0);
    CHECK(std::abs(json::parse(boom.out)["mean"][0].get<double>() - 3.60356119608) < 1e-8);
    const Result mix = run("oracle --model mixture");
    REQUIRE(mix.code == 0);
    CHECK(json::parse(mix.out)["mean"] == -2.0);
}
