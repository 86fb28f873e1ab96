#pragma once

#include <cstddef>
#include <vector>

#include "gapedge/linalg.hpp"

namespace gapedge::dirac2d {

inline constexpr std::size_t kMinRadialNodes = 200;
inline constexpr double kMinChannelCutoff = 2.5;
inline constexpr double kReshiftRel = 1e-9;      // zero-pivot re-shift, times m
inline constexpr double kCutoffSettleTol = 1e-6;  // lowest reconstructed Mathieu channel
inline constexpr double kOuterRadiusFactor = 50.0;

/// Pure point dipole |d| cos(phi) / r^2 along the x axis, massive 2D Dirac
/// operator, partial waves kappa in {-k_max, ..., k_max} (half-integers).
struct Config {
    double m = 1.0;
    double d_abs = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t n_r = 0;
    double k_max = 2.5;
    std::vector<double> E_grid;  // ascending, inside (0, m)

    void validate() const;
    std::size_t channels() const;  // 2 k_max + 1
};

/// Fills r_min, r_max and k_max from m, |d| and E_grid when they are zero.
Config with_defaults(Config c);

/// Smallest half-integer cutoff >= 5/2 at which the lowest eigenvalue of the
/// Fourier-truncated angular problem moves by less than kCutoffSettleTol
/// when the cutoff grows by 2.
double settled_cutoff(double p);

/// Block-tridiagonal Hamiltonian on a logarithmic radial grid. Block b holds
/// the radial node n_r-1-b (outermost first); inside a block each channel
/// contributes its integer-node unknown followed by its half-node unknown.
linalg::BlockTridiag assemble(const Config& c);

/// Number of eigenvalues in [lo, hi): n_minus(hi) - n_minus(lo). A shift that
/// lands on a zero pivot is pulled inward by kReshiftRel * m.
std::size_t count_between(const linalg::BlockTridiag& h, double m, double lo, double hi);

/// N in (-E, E).
std::size_t count_in_gap(const linalg::BlockTridiag& h, double m, double E);
std::size_t count_in_gap(const Config& c, double E);

struct GapCountCurve {
    std::vector<double> energies;
    std::vector<std::size_t> counts;
    linalg::LineFit fit;         // counts against |log(m - E)|
    linalg::LineFit coarse_fit;  // same at n_r / 2
    double predicted = 0.0;      // Mathieu rate at p = 2 m |d|
    bool grid_converged = false;
    bool cutoff_settled = false;
};

GapCountCurve gap_slope(const Config& c);

}  // namespace gapedge::dirac2d
