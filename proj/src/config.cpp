#include "gapedge/cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <unistd.h>

#include "gapedge/charge_model.hpp"
#include "gapedge/dipole.hpp"
#include "gapedge/dirac2d.hpp"
#include "gapedge/dirac_channel.hpp"
#include "gapedge/errors.hpp"
#include "gapedge/linalg.hpp"
#include "gapedge/mathieu.hpp"
#include "gapedge/radial.hpp"

namespace gapedge::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 6> kCommands{{
    {Command::MathieuRate, "mathieu-rate"},
    {Command::DipoleCount, "dipole-count"},
    {Command::VerifyRate, "verify-rate"},
    {Command::DiracChannel, "dirac-channel"},
    {Command::Dirac2D, "dirac2d"},
    {Command::ChargeReport, "charge-report"},
}};

// Default dirac2d energy grid: gaps m - E log-spaced between these (times m).
constexpr double kGapFrom = 1e-2;
constexpr double kGapTo = 1e-7;
constexpr std::size_t kGapPoints = 24;
constexpr std::size_t kDefaultRadialNodes = 4000;

[[noreturn]] void invalid(const std::string& what) { throw ConfigError(kExitInvalid, what); }

// Reads one JSON object, records which keys were consumed and builds the
// normalized copy with defaults filled in.
class Fields {
public:
    Fields(const json& in, std::string path) : in_(in), path_(std::move(path)) {
        if (!in_.is_object()) invalid(path_ + ": expected an object");
    }

    double number(const char* key, std::optional<double> fallback = std::nullopt) {
        const json* v = take(key);
        if (!v) {
            if (!fallback) invalid(at(key) + ": required");
            return put(key, *fallback);
        }
        if (!v->is_number()) invalid(at(key) + ": expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) invalid(at(key) + ": must be finite");
        return put(key, x);
    }

    std::size_t count(const char* key, std::size_t fallback) {
        const json* v = take(key);
        if (!v) return put(key, fallback);
        if (!v->is_number_unsigned()) invalid(at(key) + ": expected a nonnegative integer");
        return put(key, v->get<std::size_t>());
    }

    std::optional<std::vector<double>> numbers(const char* key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        if (!v->is_array()) invalid(at(key) + ": expected an array of numbers");
        std::vector<double> xs;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) invalid(at(key) + "[" + std::to_string(i) + "]: expected a number");
            xs.push_back((*v)[i].get<double>());
        }
        out_[key] = xs;
        return xs;
    }

    const json* raw(const char* key) { return take(key); }
    std::string at(const std::string& key) const { return path_ + "." + key; }
    json& out() { return out_; }

    /// Rejects whatever was not consumed.
    void finish() const {
        for (const auto& [key, value] : in_.items())
            if (!seen_.count(key)) invalid("unknown key: " + at(key));
    }

private:
    const json* take(const char* key) {
        seen_.insert(key);
        auto it = in_.find(key);
        return it == in_.end() ? nullptr : &*it;
    }
    template <typename T>
    T put(const char* key, T value) {
        out_[key] = value;
        return value;
    }

    const json& in_;
    std::string path_;
    std::set<std::string> seen_;
    json out_ = json::object();
};

// Module validation failures at parse time are invariant violations.
template <typename F>
void check(F&& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        invalid(e.what());
    }
}

json normalize_mathieu(Fields& f) {
    const double p = std::abs(f.number("p"));
    f.out()["p"] = p;  // the spectrum is even in p
    const std::size_t n = f.count("n_modes", mathieu::Problem::min_modes(p));
    check([&] { mathieu::Problem{p, n}.validate(); });
    return f.out();
}

dipole::Problem read_dipole(Fields& f) {
    dipole::Problem prob{f.number("m", 1.0), f.number("dipole"), f.number("gamma", 1.0)};
    check([&] { prob.validate(); });
    return prob;
}

json normalize_dipole_count(Fields& f) {
    read_dipole(f);
    const auto eps = f.numbers("eps");
    if (!eps) invalid(f.at("eps") + ": required");
    if (eps->empty()) invalid(f.at("eps") + ": empty eps grid");
    for (std::size_t i = 0; i < eps->size(); ++i) {
        if (!((*eps)[i] > 0.0)) invalid(f.at("eps") + ": values must be positive");
        if (i > 0 && !((*eps)[i] < (*eps)[i - 1]))
            invalid(f.at("eps") + ": values must be strictly descending");
    }
    return f.out();
}

json normalize_verify_rate(Fields& f) {
    const auto prob = read_dipole(f);
    if (!(prob.p() > 0.0)) invalid(f.at("dipole") + ": rate check needs a nonzero dipole");
    if (const json* s = f.raw("sandwich")) {
        Fields g(*s, f.at("sandwich"));
        dipole::SandwichParams sp{g.number("zeta", 0.05), g.number("eta", 0.05),
                                  g.number("xi", 0.05)};
        g.finish();
        check([&] { sp.validate(); });
        f.out()["sandwich"] = g.out();
    }
    return f.out();
}

json normalize_dirac_channel(Fields& f) {
    dirac_channel::Spec spec{f.number("kappa"), f.number("nu"), f.number("theta", 1.0)};
    check([&] { spec.validate(); });
    auto window = f.numbers("window");
    if (!window) {
        window = std::vector<double>{-50.0, 50.0};
        f.out()["window"] = *window;
    }
    if (window->size() != 2 || !((*window)[0] < (*window)[1]))
        invalid(f.at("window") + ": expected [lo, hi] with lo < hi");
    if (f.count("max_count", 100) == 0) invalid(f.at("max_count") + ": must be positive");
    const double r0 = f.number("r0", spec.start_radius());
    check([&] { dirac_channel::seed(spec, r0); });
    return f.out();
}

dirac2d::Config read_dirac2d(const json& params) {
    dirac2d::Config c;
    c.m = params.at("m").get<double>();
    c.d_abs = params.at("dipole").get<double>();
    c.r_min = params.at("r_min").get<double>();
    c.r_max = params.at("r_max").get<double>();
    c.n_r = params.at("n_r").get<std::size_t>();
    c.k_max = params.at("k_max").get<double>();
    c.E_grid = params.at("energies").get<std::vector<double>>();
    return c;
}

json normalize_dirac2d(Fields& f) {
    const double m = f.number("m", 1.0);
    const double d = f.number("dipole");
    f.number("r_min", 0.0);
    f.number("r_max", 0.0);
    f.count("n_r", kDefaultRadialNodes);
    f.number("k_max", 0.0);
    const double from = f.number("gap_from", kGapFrom);
    const double to = f.number("gap_to", kGapTo);
    const std::size_t points = f.count("points", kGapPoints);
    if (!f.numbers("energies")) {
        if (!(from > to && to > 0.0 && from < 1.0) || points < 2)
            invalid(f.at("gap_from") + ": need 1 > gap_from > gap_to > 0 and points >= 2");
        std::vector<double> energies;
        for (std::size_t i = 0; i < points; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(points - 1);
            energies.push_back(m - m * from * std::pow(to / from, s));
        }
        f.out()["energies"] = energies;
    }
    if (!(m > 0.0) || !(d >= 0.0)) invalid(f.at("m") + ": need m > 0 and dipole >= 0");
    check([&] {
        const auto c = dirac2d::with_defaults(read_dirac2d(f.out()));
        c.validate();
        f.out()["r_min"] = c.r_min;
        f.out()["r_max"] = c.r_max;
        f.out()["k_max"] = c.k_max;
    });
    return f.out();
}

charge::Distribution read_distribution(const json& params) {
    charge::Distribution dist;
    for (const auto& p : params.at("points"))
        dist.points.push_back({{p.at("x").get<double>(), p.at("y").get<double>()},
                               p.at("coupling").get<double>()});
    for (const auto& r : params.at("regulars"))
        dist.regulars.push_back({r.at("center").get<std::array<double, 3>>(),
                                 r.at("charge").get<double>(), r.at("width").get<double>()});
    return dist;
}

json normalize_charge(Fields& f) {
    json points = json::array(), regulars = json::array();
    if (const json* ps = f.raw("points")) {
        if (!ps->is_array()) invalid(f.at("points") + ": expected an array");
        for (std::size_t i = 0; i < ps->size(); ++i) {
            Fields g((*ps)[i], f.at("points") + "[" + std::to_string(i) + "]");
            g.number("x");
            g.number("y");
            g.number("coupling");
            g.finish();
            points.push_back(g.out());
        }
    }
    if (const json* rs = f.raw("regulars")) {
        if (!rs->is_array()) invalid(f.at("regulars") + ": expected an array");
        for (std::size_t i = 0; i < rs->size(); ++i) {
            Fields g((*rs)[i], f.at("regulars") + "[" + std::to_string(i) + "]");
            const auto center = g.numbers("center");
            if (!center || center->size() != 3) invalid(g.at("center") + ": expected [x, y, z]");
            g.number("charge");
            g.number("width", 1.0);
            g.finish();
            regulars.push_back(g.out());
        }
    }
    f.out()["points"] = points;
    f.out()["regulars"] = regulars;
    const auto v = charge::validate(read_distribution(f.out()));
    if (!v.ok) invalid("parameters: " + v.violations.front());
    return f.out();
}

json normalize(Command c, const json& params) {
    Fields f(params, "parameters");
    json out;
    switch (c) {
        case Command::MathieuRate: out = normalize_mathieu(f); break;
        case Command::DipoleCount: out = normalize_dipole_count(f); break;
        case Command::VerifyRate: out = normalize_verify_rate(f); break;
        case Command::DiracChannel: out = normalize_dirac_channel(f); break;
        case Command::Dirac2D: out = normalize_dirac2d(f); break;
        case Command::ChargeReport: out = normalize_charge(f); break;
    }
    f.finish();
    return out;
}

// ---- rendering ----

json fit_json(const linalg::LineFit& fit) {
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"slope_stderr", fit.slope_stderr}};
}

json rate_json(const dipole::RateCheck& r) {
    return {{"fitted_slope", r.fitted_slope},       {"predicted_rate", r.predicted_rate},
            {"rel_err", r.rel_err},                 {"stderr_slope", r.stderr_slope},
            {"window", {r.window_lo, r.window_hi}}, {"negative_channels", r.negative_channels}};
}

json mathieu_constants() {
    return {{"convergence_tol", mathieu::kConvergenceTol},
            {"tracked_eigenvalues", mathieu::kTrackedEigenvalues},
            {"max_doublings", mathieu::kMaxDoublings},
            {"mode_margin", mathieu::kModeMargin}};
}

json dipole_constants() {
    return {{"window_samples", dipole::kWindowSamples},
            {"window_lo", dipole::kWindowLo},
            {"window_hi", dipole::kWindowHi},
            {"wide_window_hi", dipole::kWideWindowHi},
            {"shallow_exponent", dipole::kShallowExponent},
            {"extra_channels", dipole::kExtraChannels},
            {"radial_tail_margin", radial::kTailMargin}};
}

struct Artifact {
    Artifact(json r, json t, json c)
        : results(std::move(r)), tolerances(std::move(t)), constants(std::move(c)) {}

    json results;
    json tolerances;
    json constants;
    // Curve commands also fill these for CSV output.
    const char* axis = nullptr;
    std::vector<double> xs;
    std::vector<std::size_t> counts;
};

Artifact compute_mathieu(const json& p) {
    const auto sp = mathieu::spectrum({p.at("p").get<double>(), p.at("n_modes").get<std::size_t>()});
    std::size_t negative = 0;
    for (double v : sp.eigenvalues) negative += v < 0.0;
    return {{{"rate", sp.rate},
             {"eigenvalues", sp.eigenvalues},
             {"negative_count", negative},
             {"converged_modes", sp.problem.n_modes}},
            {{"eigenvalue_bisection", linalg::kBisectionTol}},
            mathieu_constants()};
}

Artifact compute_dipole_count(const json& p) {
    const dipole::Problem prob{p.at("m").get<double>(), p.at("dipole").get<double>(),
                               p.at("gamma").get<double>()};
    const auto curve = dipole::counting_curve(prob, p.at("eps").get<std::vector<double>>());
    Artifact a{{{"p", prob.p()},
                {"channels", dipole::contributing_channels(prob.p())},
                {"eps", curve.eps},
                {"counts", curve.counts}},
               {{"prufer_rel_tol", radial::kPruferRelTol}},
               dipole_constants()};
    a.axis = "epsilon";
    a.xs = curve.eps;
    a.counts = curve.counts;
    return a;
}

Artifact compute_verify_rate(const json& p) {
    const dipole::Problem prob{p.at("m").get<double>(), p.at("dipole").get<double>(),
                               p.at("gamma").get<double>()};
    json results = rate_json(dipole::verify_rate(prob));
    results["p"] = prob.p();
    if (p.contains("sandwich")) {
        const auto& s = p.at("sandwich");
        const dipole::SandwichParams sp{s.at("zeta").get<double>(), s.at("eta").get<double>(),
                                        s.at("xi").get<double>()};
        const auto c = dipole::sandwich_coefficients(prob, sp);
        const auto lower = dipole::Problem::with_coupling(c.p_lower, prob.m, prob.gamma);
        const auto upper = dipole::Problem::with_coupling(c.p_upper, prob.m, prob.gamma);
        results["sandwich"] = {{"p_lower", c.p_lower},
                               {"p_upper", c.p_upper},
                               {"lower", rate_json(dipole::verify_rate(lower))},
                               {"upper", rate_json(dipole::verify_rate(upper))}};
    }
    return {results, {{"prufer_rel_tol", radial::kPruferRelTol}}, dipole_constants()};
}

Artifact compute_dirac_channel(const json& p) {
    const dirac_channel::Spec spec{p.at("kappa").get<double>(), p.at("nu").get<double>(),
                                   p.at("theta").get<double>()};
    const auto window = p.at("window").get<std::vector<double>>();
    const double r0 = p.at("r0").get<double>();
    const auto w = dirac_channel::eigenvalues(spec, window[0], window[1],
                                              p.at("max_count").get<std::size_t>(), r0);
    const bool circle = dirac_channel::classify(spec.kappa, spec.nu) ==
                        dirac_channel::Endpoint::LimitCircle;
    return {{{"endpoint", circle ? "limit-circle" : "limit-point"},
             {"exponent", spec.exponent()},
             {"seed", dirac_channel::seed(spec, r0)},
             {"eigenvalues", w.values},
             {"total_in_window", w.total},
             {"truncated", w.truncated},
             {"min_modulus", dirac_channel::min_modulus(spec)}},
            {{"shoot_rel_tol", dirac_channel::kShootRelTol}, {"root_tol", dirac_channel::kRootTol}},
            {{"start_radius_cap", dirac_channel::kStartRadius},
             {"start_fraction", dirac_channel::kStartFraction},
             {"scan_per_unit", dirac_channel::kScanPerUnit}}};
}

Artifact compute_dirac2d(const json& p) {
    const auto config = read_dirac2d(p);
    json results;
    std::vector<std::size_t> counts;
    if (config.E_grid.size() >= 3) {
        const auto curve = dirac2d::gap_slope(config);
        counts = curve.counts;
        results = {{"fit", fit_json(curve.fit)},
                   {"coarse_fit", fit_json(curve.coarse_fit)},
                   {"predicted", curve.predicted},
                   {"rel_err", curve.predicted > 0.0
                                   ? std::abs(curve.fit.slope - curve.predicted) / curve.predicted
                                   : 0.0},
                   {"grid_converged", curve.grid_converged},
                   {"cutoff_settled", curve.cutoff_settled}};
    } else {
        const auto h = dirac2d::assemble(config);
        for (double E : config.E_grid) counts.push_back(dirac2d::count_in_gap(h, config.m, E));
    }
    results["energies"] = config.E_grid;
    results["counts"] = counts;
    results["channels"] = config.channels();
    Artifact a{results,
               {{"inertia_zero_rel", linalg::kInertiaZeroRel}, {"reshift_rel", dirac2d::kReshiftRel}},
               {{"min_radial_nodes", dirac2d::kMinRadialNodes},
                {"min_channel_cutoff", dirac2d::kMinChannelCutoff},
                {"cutoff_settle_tol", dirac2d::kCutoffSettleTol},
                {"outer_radius_factor", dirac2d::kOuterRadiusFactor}}};
    a.axis = "E";
    a.xs = config.E_grid;
    a.counts = counts;
    return a;
}

json shell_json(const charge::ShellIntegral& s) {
    return {{"value", s.value}, {"shells", s.shells}, {"converged", s.converged}};
}

Artifact compute_charge(const json& p) {
    const auto d = charge::hypothesis_diagnostics(read_distribution(p));
    return {{{"total_charge", d.moments.total_charge},
             {"dipole", {d.moments.dipole.x, d.moments.dipole.y}},
             {"gamma", d.moments.gamma},
             {"neutral", d.neutral},
             {"dipole_nonzero", d.dipole_nonzero},
             {"abs_weighted", shell_json(d.abs_weighted)},
             {"sq_weighted", shell_json(d.sq_weighted)},
             {"rearranged_abs", d.rearranged_abs},
             {"rearranged_sq", d.rearranged_sq},
             {"smooth_part_assumed", d.smooth_part_assumed},
             {"theorem_applicable", d.theorem_applicable},
             {"notes", d.notes}},
            {{"neutral_tol", charge::kNeutralTol}, {"shell_share", charge::kShellShare}},
            {{"max_shell", charge::kMaxShell},
             {"radial_nodes", charge::kRadialNodes},
             {"panels_per_shell", charge::kPanelsPerShell},
             {"angular_nodes", charge::kAngularNodes},
             {"rearrangement_cells", charge::kRearrangementCells}}};
}

Artifact compute(const RunConfig& c) {
    switch (c.command) {
        case Command::MathieuRate: return compute_mathieu(c.parameters);
        case Command::DipoleCount: return compute_dipole_count(c.parameters);
        case Command::VerifyRate: return compute_verify_rate(c.parameters);
        case Command::DiracChannel: return compute_dirac_channel(c.parameters);
        case Command::Dirac2D: return compute_dirac2d(c.parameters);
        case Command::ChargeReport: return compute_charge(c.parameters);
    }
    throw Error("unhandled command");
}

void write_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error("cannot write " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move output into place at " + path + ": " + ec.message());
    }
}

}  // namespace

std::string_view command_name(Command c) {
    for (const auto& [cmd, name] : kCommands)
        if (cmd == c) return name;
    return "?";
}

json RunConfig::echo() const {
    json out = {{"command", command_name(command)},
                {"parameters", parameters},
                {"format", format == Format::Csv ? "csv" : "json"}};
    if (!output_path.empty()) out["output_path"] = output_path;
    if (timing) out["timing"] = true;
    return out;
}

RunConfig parse_config(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError(kExitMalformed, "malformed JSON");
    return parse_document(doc);
}

RunConfig parse_document(const json& doc) {
    if (!doc.is_object()) invalid("config: expected a JSON object");
    auto cmd = doc.find("command");
    if (cmd == doc.end() || !cmd->is_string())
        throw ConfigError(kExitUnknownCommand, "config: missing command");
    RunConfig out;
    bool known = false;
    for (const auto& [c, name] : kCommands)
        if (name == cmd->get<std::string>()) {
            out.command = c;
            known = true;
        }
    if (!known) throw ConfigError(kExitUnknownCommand, "unknown command: " + cmd->get<std::string>());

    for (const auto& [key, value] : doc.items()) {
        if (key == "command" || key == "parameters") continue;
        if (key == "output_path") {
            if (!value.is_string()) invalid("output_path: expected a string");
            out.output_path = value.get<std::string>();
        } else if (key == "format") {
            if (value == "csv") out.format = Format::Csv;
            else if (value == "json") out.format = Format::Json;
            else invalid("format: expected \"csv\" or \"json\"");
        } else if (key == "timing") {
            if (!value.is_boolean()) invalid("timing: expected a boolean");
            out.timing = value.get<bool>();
        } else {
            invalid("unknown key: " + key);
        }
    }
    if (out.format == Format::Csv && out.command != Command::DipoleCount &&
        out.command != Command::Dirac2D)
        invalid("format: csv is only available for dipole-count and dirac2d");

    auto params = doc.find("parameters");
    out.parameters = normalize(out.command, params == doc.end() ? json::object() : *params);
    return out;
}

std::string render(const RunConfig& config, double* wall_seconds) {
    const auto start = std::chrono::steady_clock::now();
    const Artifact a = compute(config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (wall_seconds) *wall_seconds = elapsed;

    if (config.format == Format::Csv) {
        std::string text = "# " + config.echo().dump() + "\n" + a.axis + ",count\n";
        char line[64];
        for (std::size_t i = 0; i < a.xs.size(); ++i) {
            std::snprintf(line, sizeof line, "%.16e,%zu\n", a.xs[i], a.counts[i]);
            text += line;
        }
        return text;
    }
    json report = {{"input", config.echo()},
                   {"results", a.results},
                   {"tolerances", a.tolerances},
                   {"constants", a.constants}};
    if (config.timing) report["wall_time_s"] = elapsed;
    return report.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& err) {
    try {
        double seconds = 0.0;
        const std::string text = render(config, &seconds);
        if (config.output_path.empty()) {
            std::cout << text << std::flush;
        } else {
            write_atomic(config.output_path, text);
        }
        char line[96];
        std::snprintf(line, sizeof line, "%s: %.3f s", command_name(config.command).data(), seconds);
        err << line << "\n";
        return kExitOk;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitModule;
    }
}

}  // namespace gapedge::cli
