#pragma once

#include <cstddef>
#include <vector>

namespace gapedge::dirac_channel {

inline constexpr double kShootRelTol = 1e-12;
inline constexpr double kRootTol = 1e-12;
inline constexpr double kStartRadius = 1e-6;     // absolute cap on r0
inline constexpr double kStartFraction = 1e-3;   // r0 <= this * theta
inline constexpr std::size_t kScanPerUnit = 4;   // lambda samples per unit of |lambda| theta

enum class Endpoint { LimitCircle, LimitPoint };

/// Radial channel [[nu/r, -d/dr - kappa/r], [d/dr - kappa/r, nu/r]] on
/// (0, theta) with psi1(theta) = psi2(theta).
struct Spec {
    double kappa = 0.5;
    double nu = 0.0;
    double theta = 1.0;

    void validate() const;
    double exponent() const;  // sqrt(kappa^2 - nu^2)
    double start_radius() const;
};

Endpoint classify(double kappa, double nu);

/// Leading term plus first-order correction of the r^{+s} solution at r0,
/// for eigenvalue parameter lambda.
std::vector<double> seed(const Spec& spec, double r0, double lambda = 0.0);

/// Prufer angle atan2(psi1, psi2) at r = theta, continuous in lambda.
/// Increasing in lambda; eigenvalues sit where it equals pi/4 mod pi.
double end_phase(const Spec& spec, double lambda, double r0);

/// psi1 - psi2 at theta on the unit-normalized solution.
double normalized_miss(const Spec& spec, double lambda);

struct EigenWindow {
    std::vector<double> values;  // ascending
    std::size_t total = 0;       // eigenvalues in the window, from the phase count
    bool truncated = false;      // total > max_count
};

/// Eigenvalues in [lo, hi]: count from the phase difference, then refine each
/// by Brent on the phase. Returns at most max_count, lowest first.
EigenWindow eigenvalues(const Spec& spec, double lo, double hi, std::size_t max_count,
                        double r0 = 0.0);

/// Smallest |lambda| over the spectrum, searching a window that doubles
/// until it holds an eigenvalue.
double min_modulus(const Spec& spec);

}  // namespace gapedge::dirac_channel
