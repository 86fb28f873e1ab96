#include "gapedge/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gapedge/errors.hpp"
#include "gapedge/linalg.hpp"

namespace gapedge::radial {

void Channel::validate() const {
    if (!std::isfinite(mu)) throw InvalidInput("radial: mu must be finite");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("radial: gamma must be > 0");
}

std::size_t count_below(const Channel& ch, double eps) {
    ch.validate();
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("radial: eps must be > 0");
    // mu >= 0: the operator is nonnegative (Hardy), nothing below -eps.
    if (ch.mu >= 0.0) return 0;

    // With u = sqrt(r) w and tau = log(r / gamma): w'' = (mu + c e^{2 tau}) w,
    // c = gamma^2 eps. Phase: w = rho sin(theta), w' = S rho cos(theta).
    const double c = (ch.gamma * ch.gamma) * eps;
    const double s = std::sqrt(-ch.mu);
    const double mu = ch.mu;
    const linalg::OdeRhs rhs = [=](double tau, std::span<const double> y, std::span<double> dy) {
        const double sn = std::sin(y[0]), cs = std::cos(y[0]);
        dy[0] = s * cs * cs + ((-mu - c * std::exp(2.0 * tau)) / s) * sn * sn;
    };

    const double turning = 0.5 * std::log(-mu / c);
    double tau = 0.0;
    double tau_end = std::max(turning, 0.0) + kTailMargin;
    std::array<double, 1> theta{0.0};
    for (int ext = 0; ext <= kTailExtensions; ++ext) {
        auto y = linalg::integrate_ode(rhs, tau, tau_end, theta, kPruferRelTol);
        theta[0] = y[0];
        tau = tau_end;
        // Past the turning point the phase settles just above a multiple of pi.
        const double k = std::floor(theta[0] / std::numbers::pi + 0.5);
        const double rest = theta[0] - k * std::numbers::pi;
        if (rest > 0.0 && rest < 0.5 * std::numbers::pi) return static_cast<std::size_t>(k);
        tau_end += kTailMargin;
    }
    throw StiffnessError("radial: Prufer phase failed to settle in the tail", tau);
}

Eigenvalues lowest_eigenvalues(const Channel& ch, std::size_t k) {
    ch.validate();
    if (k == 0) throw InvalidInput("radial: need k >= 1");
    Eigenvalues out;
    if (ch.mu >= 0.0) {
        out.complete = false;
        return out;
    }
    // Spectrum sits above (mu - 1/4) / gamma^2.
    const double log_hi = std::log((0.25 - ch.mu) / (ch.gamma * ch.gamma));
    const double log_lo = std::log(kSmallestEps);
    const std::size_t available = count_below(ch, kSmallestEps);
    const std::size_t found = std::min(k, available);
    out.complete = found == k;
    for (std::size_t n = 1; n <= found; ++n) {
        // eps_n is where count_below drops from n to n - 1.
        double lo = log_lo, hi = log_hi;
        while (hi - lo > kLogBisectTol) {
            const double mid = 0.5 * (lo + hi);
            (count_below(ch, std::exp(mid)) >= n ? lo : hi) = mid;
        }
        out.values.push_back(-std::exp(0.5 * (lo + hi)));
    }
    return out;
}

double channel_slope(double mu) {
    if (!std::isfinite(mu)) throw InvalidInput("radial: mu must be finite");
    return std::sqrt(std::max(-mu, 0.0)) / (2.0 * std::numbers::pi);
}

}  // namespace gapedge::radial
