#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gapedge/cli.hpp"

namespace gapedge::cli {

namespace {

using nlohmann::json;

// Shorthand flag -> parameter key, per command.
struct Flag {
    const char* flag;
    const char* key;
    const char* help;
};

const std::map<std::string, std::vector<Flag>>& scalar_flags() {
    static const std::map<std::string, std::vector<Flag>> flags{
        {"mathieu-rate", {{"--p", "p", "angular coupling p"}, {"--n-modes", "n_modes", "Fourier cutoff"}}},
        {"dipole-count",
         {{"--m", "m", "mass"}, {"--dipole", "dipole", "dipole strength |d|"},
          {"--gamma", "gamma", "exterior radius"}}},
        {"verify-rate",
         {{"--m", "m", "mass"}, {"--dipole", "dipole", "dipole strength |d|"},
          {"--gamma", "gamma", "exterior radius"}}},
        {"dirac-channel",
         {{"--kappa", "kappa", "half-integer angular label"}, {"--nu", "nu", "Coulomb coupling, |nu| < 1/2"},
          {"--theta", "theta", "outer radius"}, {"--max-count", "max_count", "eigenvalues to report"}}},
        {"dirac2d",
         {{"--m", "m", "mass"}, {"--dipole", "dipole", "dipole strength |d|"},
          {"--n-r", "n_r", "radial nodes"}, {"--k-max", "k_max", "angular cutoff (half-integer)"},
          {"--r-min", "r_min", "inner radius"}, {"--r-max", "r_max", "outer radius"},
          {"--gap-from", "gap_from", "largest gap m - E"}, {"--gap-to", "gap_to", "smallest gap m - E"},
          {"--points", "points", "energies on the default grid"}}},
        {"charge-report", {}},
    };
    return flags;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(kExitMalformed, "cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Integer-valued keys must stay integers in the JSON, or the schema rejects them.
json flag_value(const std::string& key, double v) {
    if (key == "n_modes" || key == "n_r" || key == "max_count" || key == "points") {
        if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ConfigError(kExitInvalid, "--" + key + ": expected a nonnegative integer");
        return static_cast<std::size_t>(v);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    // An unknown leading word is an unknown command, not a generic parse error.
    if (argc > 1 && argv[1][0] != '-' && !scalar_flags().count(argv[1])) {
        std::cerr << "error: unknown command: " << argv[1] << "\n";
        return kExitUnknownCommand;
    }

    CLI::App app{"Bound-state counting near the gap edges of a 2D Dirac operator with a dipole"};
    app.require_subcommand(0, 1);
    std::string config_path, out_path, format;
    bool timing = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_path, "output file (default: standard output)");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--timing", timing, "include wall time in the JSON report");

    std::map<std::string, std::map<std::string, std::pair<CLI::Option*, double>>> values;
    std::map<std::string, CLI::App*> subs;
    std::vector<double> eps, window;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* window_opt = nullptr;
    for (const auto& [name, flags] : scalar_flags()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
        subs[name] = sub;
        auto& slot = values[name];
        for (const auto& f : flags) {
            auto& [opt, value] = slot[f.key];
            opt = sub->add_option(f.flag, value, f.help);
        }
        if (name == "dipole-count")
            eps_opt = sub->add_option("--eps", eps, "descending eps grid")->expected(1, -1);
        if (name == "dirac-channel")
            window_opt = sub->add_option("--window", window, "eigenvalue window lo hi")->expected(2);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        json doc = json::object();
        if (!config_path.empty()) {
            doc = json::parse(read_file(config_path), nullptr, false);
            if (doc.is_discarded()) throw ConfigError(kExitMalformed, "malformed JSON in " + config_path);
            if (!doc.is_object()) throw ConfigError(kExitInvalid, "config: expected a JSON object");
        }
        std::string chosen;
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) chosen = name;
        if (!chosen.empty()) {
            if (doc.contains("command") && doc["command"] != chosen)
                throw ConfigError(kExitInvalid, "config command differs from " + chosen);
            doc["command"] = chosen;
            json& params = doc["parameters"];
            if (params.is_null()) params = json::object();
            for (const auto& [key, slot] : values[chosen])
                if (slot.first->count() > 0) params[key] = flag_value(key, slot.second);
            if (chosen == "dipole-count" && eps_opt->count() > 0) params["eps"] = eps;
            if (chosen == "dirac-channel" && window_opt->count() > 0) params["window"] = window;
        } else if (config_path.empty()) {
            std::cerr << app.help();
            return kExitUnknownCommand;
        }
        if (!out_path.empty()) doc["output_path"] = out_path;
        if (!format.empty()) doc["format"] = format;
        if (timing) doc["timing"] = true;
        return run(parse_document(doc), std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    }
}

}  // namespace gapedge::cli
