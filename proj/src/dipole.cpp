#include "gapedge/dipole.hpp"

#include <algorithm>
#include <cmath>

#include "gapedge/errors.hpp"
#include "gapedge/linalg.hpp"
#include "gapedge/mathieu.hpp"
#include "gapedge/parallel.hpp"
#include "gapedge/radial.hpp"

namespace gapedge::dipole {

void Problem::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("dipole: m must be positive");
    // |d| = 0 is admitted as the degenerate limit with an empty spectrum.
    if (!(d_abs >= 0.0) || !std::isfinite(d_abs)) throw InvalidInput("dipole: |d| must be >= 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("dipole: gamma must be > 0");
}

Problem Problem::with_coupling(double p, double m, double gamma) {
    Problem out{m, p / (2.0 * m), gamma};
    out.validate();
    return out;
}

void SandwichParams::validate() const {
    for (double v : {zeta, eta, xi})
        if (!(v > 0.0 && v < 1.0)) throw InvalidInput("dipole: zeta, eta, xi must lie in (0, 1)");
}

std::vector<double> angular_channels(double p, std::size_t k) {
    if (!(p > 0.0)) throw InvalidInput("dipole: angular channels need p > 0");
    return mathieu::lowest(p, k);
}

std::vector<double> contributing_channels(double p) {
    if (p == 0.0) return {};
    const auto sp = mathieu::spectrum(mathieu::Problem::with_default_modes(p));
    std::vector<double> out;
    std::size_t extra = 0;
    for (double mu : sp.eigenvalues) {
        if (mu >= 0.0 && extra++ == kExtraChannels) break;
        out.push_back(mu);
    }
    return out;
}

CountingCurve counting_curve(const Problem& prob, const std::vector<double>& eps_grid) {
    prob.validate();
    if (eps_grid.empty()) throw InvalidInput("dipole: empty eps grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0) || !std::isfinite(eps_grid[i]))
            throw InvalidInput("dipole: eps values must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw InvalidInput("dipole: eps grid must be strictly descending");
    }
    CountingCurve out{eps_grid, std::vector<std::size_t>(eps_grid.size(), 0)};
    const auto channels = contributing_channels(prob.p());
    parallel_for(eps_grid.size(), [&](std::size_t i) {
        std::size_t n = 0;
        for (double mu : channels) n += radial::count_below({mu, prob.gamma}, eps_grid[i]);
        out.counts[i] = 2 * n;
    });
    return out;
}

RateCheck verify_rate(const Problem& prob) {
    prob.validate();
    RateCheck out;
    const double p = prob.p();
    if (p == 0.0) return out;  // no channels, N = 0, rate 0, rel_err 0 by convention

    const auto channels = contributing_channels(p);
    out.negative_channels = static_cast<std::size_t>(
        std::count_if(channels.begin(), channels.end(), [](double mu) { return mu < 0.0; }));
    if (out.negative_channels == 1 && std::sqrt(-channels.front()) < kShallowExponent)
        out.window_hi = kWideWindowHi;

    std::vector<double> xs, eps;
    for (std::size_t i = 0; i < kWindowSamples; ++i) {
        const double x = out.window_lo + (out.window_hi - out.window_lo) * static_cast<double>(i) /
                                             static_cast<double>(kWindowSamples - 1);
        xs.push_back(x);
        eps.push_back(std::exp(-x));
    }
    const auto curve = counting_curve(prob, eps);
    std::vector<double> ys(curve.counts.begin(), curve.counts.end());
    const auto fit = linalg::linfit(xs, ys);
    out.fitted_slope = fit.slope;
    out.stderr_slope = fit.slope_stderr;
    out.predicted_rate = mathieu::rate(p);
    out.rel_err = std::abs(fit.slope - out.predicted_rate) / out.predicted_rate;
    return out;
}

SandwichCouplings sandwich_coefficients(const Problem& prob, const SandwichParams& s) {
    prob.validate();
    s.validate();
    const double p = prob.p();
    return {p / ((1.0 + s.zeta) * (1.0 + s.xi)), p / ((1.0 - s.zeta) * (1.0 - s.eta))};
}

EdgeMap edge_map(double E, double m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("edge_map: m must be positive");
    if (!(E > 0.0 && E < m)) throw InvalidInput("edge_map: E must lie in (0, m)");
    return edge_map_from_gap(m - E, m);
}

EdgeMap edge_map_from_gap(double gap, double m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("edge_map: m must be positive");
    if (!(gap > 0.0 && gap < m)) throw InvalidInput("edge_map: m - E must lie in (0, m)");
    // m^2 - E^2 = (m - E)(2m - (m - E)) avoids cancellation near the edge.
    const double eps = gap * (2.0 * m - gap);
    return {eps, std::abs(std::log(eps) / std::log(gap))};
}

}  // namespace gapedge::dipole
