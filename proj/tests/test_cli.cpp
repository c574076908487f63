#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

// End-to-end tests against the installed binary. The test runner exports
// QSEARCH_CLI_PATH; everything here shells out and inspects exit codes,
// stdout, and written files.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    static const fs::path dir =
        fs::temp_directory_path() /
        ("qsearch_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

fs::path scratch_file(const std::string& name) {
    return scratch_dir() / name;
}

CliResult run_cli(const std::string& args) {
    const char* binary = std::getenv("QSEARCH_CLI_PATH");
    REQUIRE_MESSAGE(binary != nullptr,
                    "QSEARCH_CLI_PATH must point at the CLI binary");
    static int call = 0;
    const fs::path out = scratch_file("stdout_" + std::to_string(++call));
    const fs::path err = scratch_file("stderr_" + std::to_string(call));
    const std::string cmd = std::string(binary) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (status != -1 && WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

json parse_json(const std::string& text) {
    return json::parse(text);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag") {
    const auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("qsearch 1.0.0") != std::string::npos);
}

TEST_CASE("predict writes the schedule report atomically") {
    const fs::path out = scratch_file("nested/dir/predict.json");
    const auto r = run_cli("predict --partition 6,6,6 --boost none --out " +
                           out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    REQUIRE(fs::exists(out));
    CHECK_FALSE(fs::exists(out.string() + ".tmp"));

    const json j = parse_json(slurp(out));
    CHECK(j["iterates"] == json::array({102, 25, 6}));
    CHECK(j["oracle_calls"]["total"] == 464);
    CHECK(j["grover_baseline"]["iterations"] == 355);
    CHECK(std::abs(j["overall_success"].get<double>() -
                   0.9666010973664854) <= 1e-12);
    CHECK(std::abs(j["overhead"].get<double>() - 464.0 / 355.0) <= 1e-12);
    CHECK(j["config"]["command"] == "predict");
    CHECK(j["version"] == "qsearch 1.0.0");
}

TEST_CASE("predict csv lists one row per round") {
    const auto r = run_cli("predict --partition 9,9 --boost none "
                           "--format csv");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "round,stages,final_iterate,gamma,success,oracle_calls");
    std::getline(lines, line);
    CHECK(line.rfind("1,2,201,", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("2,1,17,", 0) == 0);
}

TEST_CASE("configuration mistakes exit with code 2") {
    CHECK(run_cli("predict --partition 0,3").exit_code == 2);
    CHECK(run_cli("predict").exit_code == 2); // partition missing
    CHECK(run_cli("predict --no-such-flag").exit_code == 2);
    CHECK(run_cli("").exit_code == 2); // subcommand required
    CHECK(run_cli("simulate --partition 2,2 --mode guess").exit_code == 2);
    CHECK(run_cli("simulate --partition 2,2 --target 10").exit_code == 2);
}

TEST_CASE("resource caps exit with code 4") {
    const auto r =
        run_cli("simulate --partition 15,15 --mode exact --max-qubits 26");
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("resource cap") != std::string::npos);
}

TEST_CASE("identical configurations produce identical bytes") {
    const fs::path a = scratch_file("sim_a.json");
    const fs::path b = scratch_file("sim_b.json");
    const std::string args =
        "simulate --partition 2,2 --shots 50 --seed 7 ";
    REQUIRE(run_cli(args + "--out " + a.string()).exit_code == 0);
    REQUIRE(run_cli(args + "--out " + b.string()).exit_code == 0);
    const std::string bytes = slurp(a);
    CHECK(bytes == slurp(b));
    CHECK(!bytes.empty());

    const json j = parse_json(bytes);
    CHECK(j["shots"] == 50);
    CHECK(j["seed"] == 7);
    long long histogram_total = 0;
    for (const auto& [bits, count] : j["round_histograms"][1].items()) {
        CHECK(bits.size() == 4);
        histogram_total += count.get<long long>();
    }
    CHECK(histogram_total == 50);
}

TEST_CASE("config file fills gaps and explicit flags win") {
    const fs::path cfg = scratch_file("config.json");
    {
        std::ofstream out(cfg);
        out << R"({"partition": "2,2", "shots": 5, "seed": 9})";
    }
    const fs::path first = scratch_file("cfg_first.json");
    const auto r1 = run_cli("simulate --config " + cfg.string() + " --out " +
                            first.string());
    REQUIRE(r1.exit_code == 0);
    const json j1 = parse_json(slurp(first));
    CHECK(j1["shots"] == 5);
    CHECK(j1["seed"] == 9);

    const fs::path second = scratch_file("cfg_second.json");
    const auto r2 = run_cli("simulate --config " + cfg.string() +
                            " --shots 7 --out " + second.string());
    REQUIRE(r2.exit_code == 0);
    const json j2 = parse_json(slurp(second));
    CHECK(j2["shots"] == 7);
    CHECK(j2["seed"] == 9);

    const fs::path broken = scratch_file("broken.json");
    {
        std::ofstream out(broken);
        out << R"({"partition": "2,2", "shotz": 5})";
    }
    CHECK(run_cli("simulate --config " + broken.string()).exit_code == 2);
}

TEST_CASE("exact simulation reproduces the prediction") {
    const fs::path pred = scratch_file("xcheck_pred.json");
    const fs::path sim = scratch_file("xcheck_sim.json");
    REQUIRE(run_cli("predict --partition 4,4 --boost none --out " +
                    pred.string())
                .exit_code == 0);
    REQUIRE(run_cli("simulate --partition 4,4 --boost none --mode exact "
                    "--out " +
                    sim.string())
                .exit_code == 0);
    const json jp = parse_json(slurp(pred));
    const json js = parse_json(slurp(sim));
    CHECK(std::abs(js["success_probability"].get<double>() -
                   jp["overall_success"].get<double>()) <= 1e-10);
}

TEST_CASE("verification suites pass and the negative control fails") {
    const auto clean = run_cli("verify --instances 3 --trials 4 --seed 2");
    CHECK(clean.exit_code == 0);
    CHECK(clean.out.find("PASS") != std::string::npos);
    CHECK(clean.out.find("FAIL") == std::string::npos);

    const fs::path report = scratch_file("verify.json");
    const auto biased =
        run_cli("verify --instances 3 --trials 4 --seed 2 "
                "--inject-gamma-error 1e-3 --out " +
                report.string());
    CHECK(biased.exit_code == 3);
    CHECK(biased.out.find("FAIL") != std::string::npos);

    const json j = parse_json(slurp(report));
    CHECK(j["pass"] == false);
    REQUIRE(j["suites"].size() == 4);
    bool spectrum_failed = false;
    for (const auto& suite : j["suites"])
        if (suite["name"].get<std::string>().find("spectrum") !=
                std::string::npos &&
            !suite["pass"].get<bool>())
            spectrum_failed = true;
    CHECK(spectrum_failed);
}

TEST_CASE("sweep defaults to csv on stdout") {
    const auto r = run_cli("sweep --n-min 18 --n-max 20 --n-step 2 "
                           "--stages 2 --scenarios S3 --multipliers 1");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,stages,scenario,oracle_multiplier,recursive_calls,"
                    "grover_calls,overhead,break_even,relative_depth,"
                    "failure_prob");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 2);
}

TEST_CASE("depth report for a near-equal split") {
    const auto r = run_cli("depth --n 18 --stage-count 2 --scenario S1");
    REQUIRE(r.exit_code == 0);
    const json j = parse_json(r.out);
    CHECK(j["config"]["boost"] == "none");
    CHECK(j["partition"] == json::array({9, 9}));
    CHECK(j["recursive_oracle_calls"] == 419);
    CHECK(j["grover_oracle_calls"] == 389);
    CHECK(std::abs(j["break_even"].get<double>() - 10.191344811540251) <=
          1e-9);
}

} // TEST_SUITE
