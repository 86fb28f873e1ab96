#pragma once

#include <cstddef>
#include <vector>

namespace gapedge::radial {

inline constexpr double kPruferRelTol = 1e-10;
inline constexpr double kTailMargin = 5.0;  // in log r beyond the turning point
inline constexpr int kTailExtensions = 8;
inline constexpr double kSmallestEps = 1e-60;
inline constexpr double kLogBisectTol = 1e-11;

/// -u'' + (mu - 1/4) u / r^2 on (gamma, inf), Dirichlet at gamma.
struct Channel {
    double mu = 0.0;
    double gamma = 1.0;
    void validate() const;
};

/// Number of eigenvalues below -eps, by counting zeros of the Dirichlet
/// solution at energy -eps with a Prufer phase in t = log(r / gamma).
std::size_t count_below(const Channel& ch, double eps);

struct Eigenvalues {
    std::vector<double> values;  // -eps_1 < -eps_2 < ..., deepest first
    bool complete = true;        // false when fewer than requested above -kSmallestEps
};

/// The k deepest eigenvalues, each located by bisecting count_below in log eps.
Eigenvalues lowest_eigenvalues(const Channel& ch, std::size_t k);

/// sqrt(max(-mu, 0)) / (2 pi): growth of count_below per unit of |log eps|.
double channel_slope(double mu);

}  // namespace gapedge::radial
