#pragma once

#include <cstddef>
#include <vector>

namespace gapedge::dipole {

inline constexpr std::size_t kWindowSamples = 30;
inline constexpr double kWindowLo = 20.0;      // |log eps|
inline constexpr double kWindowHi = 90.0;
inline constexpr double kWideWindowHi = 200.0;  // single shallow channel
inline constexpr double kShallowExponent = 0.5; // sqrt(-mu) below this is "shallow"
inline constexpr std::size_t kExtraChannels = 2; // nonnegative channels kept

/// Exterior Dirichlet problem on |x| > gamma for -Laplace + <c, x>/|x|^3 with
/// |c| = 2 m |d|, i.e. the Schrodinger comparison operator at one gap edge.
struct Problem {
    double m = 1.0;
    double d_abs = 0.0;
    double gamma = 1.0;

    double p() const noexcept { return 2.0 * m * d_abs; }
    void validate() const;
    /// Problem whose coupling 2 m |d| equals p, at the given m and gamma.
    static Problem with_coupling(double p, double m, double gamma);
};

struct SandwichParams {
    double zeta = 0.0;
    double eta = 0.0;
    double xi = 0.0;
    void validate() const;
};

struct CountingCurve {
    std::vector<double> eps;            // strictly decreasing
    std::vector<std::size_t> counts;    // nondecreasing
};

struct RateCheck {
    double fitted_slope = 0.0;
    double predicted_rate = 0.0;
    double rel_err = 0.0;
    double stderr_slope = 0.0;
    double window_lo = kWindowLo;
    double window_hi = kWindowHi;
    std::size_t negative_channels = 0;
};

struct SandwichCouplings {
    double p_lower = 0.0;
    double p_upper = 0.0;
};

struct EdgeMap {
    double eps = 0.0;
    double log_ratio = 0.0;
};

/// The k lowest angular eigenvalues (Mathieu at coupling p), ascending. The
/// same list serves both dipole signs.
std::vector<double> angular_channels(double p, std::size_t k);

/// Channels entering the sum: every negative one plus kExtraChannels more.
std::vector<double> contributing_channels(double p);

/// N(eps) = 2 * sum over channels of radial count_below; the 2 covers both
/// gap edges, whose angular spectra coincide.
CountingCurve counting_curve(const Problem& prob, const std::vector<double>& eps_grid);

/// Fits N against |log eps| on kWindowSamples log-spaced points and compares
/// with the Mathieu rate at p.
RateCheck verify_rate(const Problem& prob);

SandwichCouplings sandwich_coefficients(const Problem& prob, const SandwichParams& s);

/// eps = m^2 - E^2 and |log(m^2 - E^2) / log(m - E)|.
EdgeMap edge_map(double E, double m);
/// Same map from the gap distance m - E, for edges closer than double spacing near m.
EdgeMap edge_map_from_gap(double gap, double m);

}  // namespace gapedge::dipole
