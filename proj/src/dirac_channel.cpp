#include "gapedge/dirac_channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gapedge/errors.hpp"
#include "gapedge/linalg.hpp"

namespace gapedge::dirac_channel {

namespace {

constexpr double kPi = std::numbers::pi;

bool half_integer(double k) {
    const double twice = 2.0 * k;
    return std::abs(twice - std::round(twice)) < 1e-12 &&
           static_cast<long>(std::round(twice)) % 2 != 0;
}

}  // namespace

void Spec::validate() const {
    if (!half_integer(kappa)) throw InvalidInput("dirac_channel: kappa must be a half-integer");
    if (!(std::abs(nu) < 0.5)) throw InvalidInput("dirac_channel: need |nu| < 1/2");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw InvalidInput("dirac_channel: theta must be positive");
}

double Spec::exponent() const { return std::sqrt(kappa * kappa - nu * nu); }

double Spec::start_radius() const { return std::min(kStartRadius, kStartFraction * theta); }

Endpoint classify(double kappa, double nu) {
    Spec{kappa, nu, 1.0}.validate();
    // Both r^{+s} and r^{-s} are square-integrable at 0 iff s < 1/2.
    const double s = std::sqrt(kappa * kappa - nu * nu);
    return s < 0.5 ? Endpoint::LimitCircle : Endpoint::LimitPoint;
}

std::vector<double> seed(const Spec& spec, double r0, double lambda) {
    spec.validate();
    if (!(r0 > 0.0)) throw InvalidInput("dirac_channel: r0 must be positive");
    if (r0 > kStartFraction * spec.theta * (1.0 + 1e-12))
        throw InvalidInput("dirac_channel: r0 above 1e-3 * theta spoils the series seed");
    const double k = spec.kappa, n = spec.nu, s = spec.exponent();
    // Two proportional forms of the leading vector; take the better conditioned.
    std::array<double, 2> a0{k + s, n};
    const std::array<double, 2> alt{-n, s - k};
    if (std::hypot(alt[0], alt[1]) > std::hypot(a0[0], a0[1])) a0 = alt;
    // [[s+1-k, n], [-n, s+1+k]] a1 = lambda (a0_2, -a0_1); determinant 2s+1.
    const double det = 2.0 * s + 1.0;
    const double r1 = lambda * a0[1], r2 = -lambda * a0[0];
    const double a1x = ((s + 1.0 + k) * r1 - n * r2) / det;
    const double a1y = ((s + 1.0 - k) * r2 + n * r1) / det;
    const double scale = std::pow(r0, s);
    return {scale * (a0[0] + a1x * r0), scale * (a0[1] + a1y * r0)};
}

double end_phase(const Spec& spec, double lambda, double r0) {
    const auto v = seed(spec, r0, lambda);
    const double k = spec.kappa, n = spec.nu;
    // psi1 = rho sin(theta), psi2 = rho cos(theta), x = log r.
    const linalg::OdeRhs rhs = [=](double x, std::span<const double> y, std::span<double> dy) {
        dy[0] = lambda * std::exp(x) - n + k * std::sin(2.0 * y[0]);
    };
    const std::array<double, 1> start{std::atan2(v[0], v[1])};
    return linalg::integrate_ode(rhs, std::log(r0), std::log(spec.theta), start, kShootRelTol)[0];
}

double normalized_miss(const Spec& spec, double lambda) {
    const double th = end_phase(spec, lambda, spec.start_radius());
    return std::sin(th) - std::cos(th);
}

EigenWindow eigenvalues(const Spec& spec, double lo, double hi, std::size_t max_count,
                        double r0) {
    spec.validate();
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidInput("dirac_channel: window must be a bounded interval lo < hi");
    if (r0 == 0.0) r0 = spec.start_radius();

    const auto steps = static_cast<std::size_t>(
        std::ceil((hi - lo) * spec.theta * static_cast<double>(kScanPerUnit))) + 1;
    std::vector<double> grid(steps + 1), phase(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
        phase[i] = end_phase(spec, grid[i], r0);
    }

    // Targets pi/4 + j pi inside [phase(lo), phase(hi)].
    const auto first = static_cast<long>(std::ceil((phase.front() - 0.25 * kPi) / kPi));
    const auto last = static_cast<long>(std::floor((phase.back() - 0.25 * kPi) / kPi));
    EigenWindow out;
    out.total = last >= first ? static_cast<std::size_t>(last - first + 1) : 0;
    out.truncated = out.total > max_count;

    std::size_t cell = 0;
    for (long j = first; j <= last && out.values.size() < max_count; ++j) {
        const double target = 0.25 * kPi + static_cast<double>(j) * kPi;
        while (cell + 1 < steps && phase[cell + 1] < target) ++cell;
        const double a = grid[cell], b = grid[cell + 1];
        if (phase[cell] == target) {
            out.values.push_back(a);
            continue;
        }
        if (phase[cell + 1] == target) {
            out.values.push_back(b);
            continue;
        }
        out.values.push_back(linalg::brent_root(
            [&](double l) { return end_phase(spec, l, r0) - target; }, a, b, kRootTol));
    }
    return out;
}

double min_modulus(const Spec& spec) {
    spec.validate();
    double w = (std::abs(spec.kappa) + 1.0) / spec.theta;
    for (int round = 0; round < 40; ++round, w *= 2.0) {
        const auto probe = eigenvalues(spec, -w, w, 0);
        if (probe.total == 0) continue;
        const auto found = eigenvalues(spec, -w, w, probe.total);
        double best = std::abs(found.values.front());
        for (double l : found.values) best = std::min(best, std::abs(l));
        return best;
    }
    throw BracketError("dirac_channel: no eigenvalue found while expanding the window");
}

}  // namespace gapedge::dirac_channel
