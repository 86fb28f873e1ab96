#pragma once

#include <array>
#include <string>
#include <vector>

namespace gapedge::charge {

inline constexpr int kMaxShell = 14;              // outer radius 2^14 * base
inline constexpr double kShellShare = 0.01;       // last two shells below 1% each
inline constexpr int kRadialNodes = 16;           // Gauss-Legendre per radial panel
inline constexpr int kPanelsPerShell = 4;
inline constexpr int kAngularNodes = 256;
inline constexpr int kRearrangementCells = 600;   // per side of the square grid
inline constexpr double kNeutralTol = 1e-12;      // relative to total |charge|

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Point charge in the sheet with subcritical coupling 0 < |coupling| < 1/2.
struct PointCharge {
    Vec2 position;
    double coupling = 0.0;
};

/// Isotropic 3D Gaussian charge cloud.
struct RegularCharge {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double total_charge = 0.0;
    double width = 1.0;
};

struct Distribution {
    std::vector<PointCharge> points;
    std::vector<RegularCharge> regulars;
};

struct Validation {
    bool ok = true;
    std::vector<std::string> violations;
};

struct Moments {
    double total_charge = 0.0;
    Vec2 dipole;
    double gamma = 0.0;  // twice the largest point-charge distance from 0
};

struct ShellIntegral {
    double value = 0.0;
    std::vector<double> shells;  // disk of radius base, then annuli to 2^j base
    bool converged = false;
};

struct Diagnostics {
    Moments moments;
    bool neutral = false;         // Q = 0 (needed for the weighted integrals)
    bool dipole_nonzero = false;
    ShellIntegral abs_weighted;   // int |R| log(2 + |x|)
    ShellIntegral sq_weighted;    // int R^2 log(2 + |x|)
    double rearranged_abs = 0.0;  // int_0^1 |R|_*(t) log(1/t) dt, grid estimate
    double rearranged_sq = 0.0;
    bool smooth_part_assumed = true;  // Gaussian clouds: bounded, decaying potential
    bool theorem_applicable = false;
    std::vector<std::string> notes;
};

Validation validate(const Distribution& dist);
Moments moments(const Distribution& dist);

/// Sum of point-charge and Gaussian potentials at (x, 0) in the sheet.
/// Throws SingularityError at a point-charge position.
double potential(const Distribution& dist, Vec2 x);
double regular_potential(const Distribution& dist, Vec2 x);
double singular_potential(const Distribution& dist, Vec2 x);

/// V_reg plus, outside the disk of radius gamma, V_sing minus the dipole tail.
double rest_potential(const Distribution& dist, Vec2 x);

Diagnostics hypothesis_diagnostics(const Distribution& dist);

}  // namespace gapedge::charge
