#pragma once

#include <cstddef>
#include <vector>

#include "gapedge/linalg.hpp"

namespace gapedge::mathieu {

inline constexpr double kConvergenceTol = 1e-10;  // shift of the lowest 10 eigenvalues
inline constexpr std::size_t kTrackedEigenvalues = 10;
inline constexpr int kMaxDoublings = 6;
inline constexpr std::size_t kModeMargin = 8;
inline constexpr std::size_t kExtraPositive = 10;

/// Periodic operator -d^2/dtheta^2 - p cos(theta) on the circle, truncated to
/// Fourier modes k = -n_modes..n_modes. p is stored as |p|.
struct Problem {
    double p = 0.0;
    std::size_t n_modes = 0;

    /// Smallest admissible cutoff for coupling p: ceil(sqrt(2p)) + 8.
    static std::size_t min_modes(double p);
    /// Problem with |p| and the minimal cutoff.
    static Problem with_default_modes(double p);
    void validate() const;
};

struct Spectrum {
    Problem problem;                  // the converged truncation
    std::vector<double> eigenvalues;  // ascending; all negatives plus kExtraPositive more
    double rate = 0.0;
};

linalg::SymTridiag assemble(const Problem& problem);

/// Eigenvalues with the cutoff doubled until the lowest ten settle.
/// Throws TruncationError after kMaxDoublings refinements.
Spectrum spectrum(const Problem& problem);

/// (1/pi) * sum over negative eigenvalues of sqrt(-lambda). Even in p.
double rate(double p);

/// The k lowest eigenvalues of the converged operator, ascending.
std::vector<double> lowest(double p, std::size_t k);

}  // namespace gapedge::mathieu
