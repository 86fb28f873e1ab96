#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gapedge/cli.hpp"

using namespace gapedge;
using nlohmann::json;

namespace {

int exit_code_of(std::string_view text) {
    try {
        cli::parse_config(text);
    } catch (const cli::ConfigError& e) {
        return e.exit_code();
    }
    return 0;
}

int run_main(std::vector<std::string> args) {
    args.insert(args.begin(), "gapedge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "gapedge_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("minimal mathieu config parses and gets its cutoff filled in") {
    const auto c = cli::parse_config(R"({"command":"mathieu-rate","parameters":{"p":2.0}})");
    CHECK(c.command == cli::Command::MathieuRate);
    CHECK(c.format == cli::Format::Json);
    CHECK(c.parameters.at("n_modes").get<std::size_t>() == 10);
}

TEST_CASE("exit codes separate malformed, unknown and invalid input") {
    CHECK(exit_code_of(R"({"command":)") == cli::kExitMalformed);
    CHECK(exit_code_of(R"({"command":"unknown"})") == cli::kExitUnknownCommand);
    CHECK(exit_code_of(R"({"parameters":{}})") == cli::kExitUnknownCommand);
    CHECK(exit_code_of(R"({"command":"dirac-channel","parameters":{"kappa":1.0,"nu":0.1}})") ==
          cli::kExitInvalid);
    CHECK(exit_code_of(R"({"command":"dipole-count","parameters":{"dipole":1.0,"eps":[]}})") ==
          cli::kExitInvalid);
    CHECK(exit_code_of(R"({"command":"dipole-count","parameters":{"dipole":1.0,"eps":[1e-3,1e-2]}})") ==
          cli::kExitInvalid);
    CHECK(exit_code_of(R"({"command":"mathieu-rate","parameters":{"p":2.0},"format":"csv"})") ==
          cli::kExitInvalid);
    CHECK(exit_code_of(R"({"command":"mathieu-rate","parameters":{"p":"two"}})") == cli::kExitInvalid);
    CHECK(exit_code_of(R"({"command":"charge-report","parameters":{"points":[{"x":0,"y":0,"coupling":0.7}]}})") ==
          cli::kExitInvalid);
}

TEST_CASE("unknown keys are reported with their path") {
    auto message = [](std::string_view text) {
        try {
            cli::parse_config(text);
        } catch (const cli::ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"command":"mathieu-rate","parameters":{"p":1,"q":2}})") ==
          "unknown key: parameters.q");
    CHECK(message(R"({"command":"verify-rate","parameters":{"dipole":1,"sandwich":{"zeta":0.1,"rho":1}}})") ==
          "unknown key: parameters.sandwich.rho");
    CHECK(message(R"({"command":"charge-report","parameters":{"points":[{"x":1,"y":0,"coupling":0.1,"z":3}]}})") ==
          "unknown key: parameters.points[0].z");
    CHECK(message(R"({"command":"mathieu-rate","parameters":{"p":1},"verbose":true})") ==
          "unknown key: verbose");
}

TEST_CASE("parsing the echo reproduces the config") {
    const std::vector<std::string> configs = {
        R"({"command":"mathieu-rate","parameters":{"p":-3.5}})",
        R"({"command":"dipole-count","parameters":{"dipole":0.7,"m":2,"eps":[1e-3,1e-9]},"format":"csv","output_path":"x.csv"})",
        R"({"command":"verify-rate","parameters":{"dipole":1,"sandwich":{}},"timing":true})",
        R"({"command":"dirac-channel","parameters":{"kappa":-1.5,"nu":0.3,"theta":2}})",
        R"({"command":"dirac2d","parameters":{"dipole":0.5,"n_r":400,"k_max":4.5,"points":5}})",
        R"({"command":"charge-report","parameters":{"points":[{"x":1,"y":0,"coupling":0.2}],"regulars":[{"center":[0,0,1],"charge":-0.2}]}})",
    };
    for (const auto& text : configs) {
        CAPTURE(text);
        const auto first = cli::parse_config(text);
        const auto again = cli::parse_document(first.echo());
        CHECK(again == first);
        CHECK(again.echo() == first.echo());
    }
}

TEST_CASE("csv header line round-trips and rows carry 17 significant digits") {
    const auto c = cli::parse_config(
        R"({"command":"dipole-count","parameters":{"dipole":1,"eps":[1e-4,1e-8,1e-16]},"format":"csv"})");
    const std::string text = cli::render(c);
    std::istringstream lines(text);
    std::string header, columns, row;
    std::getline(lines, header);
    std::getline(lines, columns);
    std::getline(lines, row);
    REQUIRE(header.rfind("# ", 0) == 0);
    CHECK(cli::parse_config(header.substr(2)) == c);
    CHECK(columns == "epsilon,count");
    CHECK(row.substr(0, row.find(',')) == "1.0000000000000000e-04");
}

TEST_CASE("mathieu-rate at p = 2 reports the rate and no wall time by default") {
    const auto c = cli::parse_config(R"({"command":"mathieu-rate","parameters":{"p":2.0}})");
    const json report = json::parse(cli::render(c));
    CHECK(report.at("results").at("rate").get<double>() == doctest::Approx(0.32926).epsilon(1e-4));
    CHECK(report.at("input") == c.echo());
    CHECK(report.contains("tolerances"));
    CHECK(report.at("constants").at("tracked_eigenvalues") == 10);
    CHECK_FALSE(report.contains("wall_time_s"));

    const auto timed =
        cli::parse_config(R"({"command":"mathieu-rate","parameters":{"p":2.0},"timing":true})");
    CHECK(json::parse(cli::render(timed)).contains("wall_time_s"));
}

TEST_CASE("verify-rate for unit dipole is within five percent") {
    const auto c = cli::parse_config(R"({"command":"verify-rate","parameters":{"m":1,"dipole":1,"gamma":1}})");
    const json r = json::parse(cli::render(c)).at("results");
    CHECK(r.at("rel_err").get<double>() <= 0.05);
    CHECK(r.at("p").get<double>() == 2.0);
}

TEST_CASE("command line runs write identical files and map errors to exit codes") {
    // Identical configs include the output path, so both runs target one file.
    const auto a = scratch("a.csv");
    const std::vector<std::string> args = {"dipole-count", "--dipole", "1.5", "--eps", "1e-3", "1e-6",
                                           "1e-12", "--format", "csv", "--out", a.string()};
    REQUIRE(run_main(args) == cli::kExitOk);
    const std::string first = slurp(a);
    REQUIRE(run_main(args) == cli::kExitOk);
    CHECK(slurp(a) == first);
    CHECK(slurp(a).find("epsilon,count\n") != std::string::npos);
    for (const auto& entry : std::filesystem::directory_iterator(a.parent_path()))
        CHECK(entry.path().string().find(".tmp.") == std::string::npos);

    CHECK(run_main({"no-such-command"}) == cli::kExitUnknownCommand);
    CHECK(run_main({"dirac-channel", "--kappa", "1", "--nu", "0.1", "--out", scratch("x.json").string()}) ==
          cli::kExitInvalid);

    const auto bad = scratch("bad.json");
    std::ofstream(bad) << "{\"command\": [";
    CHECK(run_main({"--config", bad.string()}) == cli::kExitMalformed);

    // A write into a missing directory fails at run time, after validation.
    CHECK(run_main({"mathieu-rate", "--p", "1", "--out", scratch("missing/dir/out.json").string()}) ==
          cli::kExitModule);
}

TEST_CASE("config file and shorthand flags combine") {
    const auto cfg = scratch("cfg.json"), out = scratch("cfg_out.json");
    std::ofstream(cfg) << R"({"command":"mathieu-rate","parameters":{"p":0.5}})";
    REQUIRE(run_main({"mathieu-rate", "--config", cfg.string(), "--p", "2", "--out", out.string()}) ==
            cli::kExitOk);
    const json report = json::parse(slurp(out));
    CHECK(report.at("input").at("parameters").at("p").get<double>() == 2.0);
}
