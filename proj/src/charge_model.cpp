#include "gapedge/charge_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapedge/errors.hpp"

namespace gapedge::charge {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

struct GaussLegendre {
    std::vector<double> nodes, weights;  // on [-1, 1]
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.nodes[i] = x;
        g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

// int over r in [a, b] and the full circle of f(x) r dr dphi.
template <class F>
double annulus(F&& f, double a, double b, const GaussLegendre& gl) {
    double total = 0.0;
    const double panel = (b - a) / kPanelsPerShell;
    for (int p = 0; p < kPanelsPerShell; ++p) {
        const double lo = a + p * panel, half = 0.5 * panel, mid = lo + half;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = mid + half * gl.nodes[i];
            double ring = 0.0;
            for (int k = 0; k < kAngularNodes; ++k) {
                const double phi = 2.0 * kPi * (k + 0.5) / kAngularNodes;
                ring += f(Vec2{r * std::cos(phi), r * std::sin(phi)});
            }
            total += half * gl.weights[i] * r * ring * (2.0 * kPi / kAngularNodes);
        }
    }
    return total;
}

template <class F>
ShellIntegral shells(F&& f, double base, const GaussLegendre& gl) {
    ShellIntegral out;
    out.shells.push_back(annulus(f, 0.0, base, gl));
    for (int j = 1; j <= kMaxShell; ++j)
        out.shells.push_back(annulus(f, base * std::ldexp(1.0, j - 1), base * std::ldexp(1.0, j), gl));
    for (double s : out.shells) out.value += s;
    const std::size_t n = out.shells.size();
    out.converged = std::isfinite(out.value) && out.value > 0.0 &&
                    std::abs(out.shells[n - 1]) < kShellShare * out.value &&
                    std::abs(out.shells[n - 2]) < kShellShare * out.value;
    if (out.value == 0.0) out.converged = true;  // identically zero integrand
    return out;
}

// int_0^1 g(t) log(1/t) dt for the non-increasing step function g that takes
// the sorted sample values on consecutive cells of area `cell`.
double rearranged_log_integral(std::vector<double> values, double cell) {
    std::sort(values.begin(), values.end(), std::greater<>());
    auto antiderivative = [](double t) { return t > 0.0 ? t - t * std::log(t) : 0.0; };
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double t0 = k * cell, t1 = std::min(1.0, (k + 1) * cell);
        if (t0 >= 1.0) break;
        total += values[k] * (antiderivative(t1) - antiderivative(t0));
    }
    return total;
}

}  // namespace

Validation validate(const Distribution& dist) {
    Validation v;
    auto fail = [&](std::string msg) {
        v.ok = false;
        v.violations.push_back(std::move(msg));
    };
    if (dist.points.empty() && dist.regulars.empty()) fail("empty distribution");
    for (std::size_t i = 0; i < dist.points.size(); ++i) {
        const auto& pc = dist.points[i];
        const std::string tag = "point " + std::to_string(i) + ": ";
        if (!finite(pc.position) || !std::isfinite(pc.coupling)) fail(tag + "non-finite value");
        else if (pc.coupling == 0.0) fail(tag + "zero coupling");
        else if (std::abs(pc.coupling) >= 0.5) fail(tag + "critical coupling");
        for (std::size_t j = 0; j < i; ++j)
            if (dist.points[j].position.x == pc.position.x &&
                dist.points[j].position.y == pc.position.y)
                fail(tag + "coincident point charges");
    }
    for (std::size_t i = 0; i < dist.regulars.size(); ++i) {
        const auto& g = dist.regulars[i];
        const std::string tag = "regular " + std::to_string(i) + ": ";
        if (!std::isfinite(g.total_charge) || !std::isfinite(g.center[0]) ||
            !std::isfinite(g.center[1]) || !std::isfinite(g.center[2]) || !std::isfinite(g.width))
            fail(tag + "non-finite value");
        else if (!(g.width > 0.0)) fail(tag + "width must be positive");
    }
    return v;
}

Moments moments(const Distribution& dist) {
    Moments m;
    double reach = 0.0;
    for (const auto& pc : dist.points) {
        m.total_charge += pc.coupling;
        m.dipole.x += pc.coupling * pc.position.x;
        m.dipole.y += pc.coupling * pc.position.y;
        reach = std::max(reach, std::hypot(pc.position.x, pc.position.y));
    }
    for (const auto& g : dist.regulars) {
        m.total_charge += g.total_charge;
        m.dipole.x += g.total_charge * g.center[0];
        m.dipole.y += g.total_charge * g.center[1];
    }
    m.gamma = 2.0 * reach;
    return m;
}

double singular_potential(const Distribution& dist, Vec2 x) {
    double v = 0.0;
    for (const auto& pc : dist.points) {
        const double d = std::hypot(x.x - pc.position.x, x.y - pc.position.y);
        if (d == 0.0) throw SingularityError("charge: potential evaluated at a point charge");
        v += pc.coupling / d;
    }
    return v;
}

double regular_potential(const Distribution& dist, Vec2 x) {
    double v = 0.0;
    for (const auto& g : dist.regulars) {
        const double dx = x.x - g.center[0], dy = x.y - g.center[1], dz = g.center[2];
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        const double s = std::sqrt(2.0) * g.width;
        if (d < 1e-8 * g.width)
            v += g.total_charge * std::sqrt(2.0 / kPi) / g.width;
        else
            v += g.total_charge * std::erf(d / s) / d;
    }
    return v;
}

double potential(const Distribution& dist, Vec2 x) {
    return singular_potential(dist, x) + regular_potential(dist, x);
}

double rest_potential(const Distribution& dist, Vec2 x) {
    const auto mo = moments(dist);
    const double r = std::hypot(x.x, x.y);
    double v = regular_potential(dist, x);
    if (r > mo.gamma) {
        if (r == 0.0) throw SingularityError("charge: rest potential evaluated at the origin");
        v += singular_potential(dist, x) - (mo.dipole.x * x.x + mo.dipole.y * x.y) / (r * r * r);
    }
    return v;
}

Diagnostics hypothesis_diagnostics(const Distribution& dist) {
    const auto check = validate(dist);
    if (!check.ok) throw InvalidInput("charge: invalid distribution: " + check.violations.front());
    Diagnostics out;
    out.moments = moments(dist);
    double scale = 0.0;
    for (const auto& pc : dist.points) scale += std::abs(pc.coupling);
    for (const auto& g : dist.regulars) scale += std::abs(g.total_charge);
    out.neutral = std::abs(out.moments.total_charge) <= kNeutralTol * scale;
    out.dipole_nonzero = std::hypot(out.moments.dipole.x, out.moments.dipole.y) > kNeutralTol * scale;
    if (!out.neutral) out.notes.push_back("total charge is nonzero: weighted integrals of R diverge");
    if (!out.dipole_nonzero) out.notes.push_back("dipole moment vanishes: accumulation law does not apply");

    const double base = out.moments.gamma > 0.0 ? out.moments.gamma : 1.0;
    const auto gl = gauss_legendre(kRadialNodes);
    auto safe_rest = [&](Vec2 x) {
        try {
            return rest_potential(dist, x);
        } catch (const SingularityError&) {
            return 0.0;  // measure-zero sample at a charge position
        }
    };
    out.abs_weighted = shells(
        [&](Vec2 x) { return std::abs(safe_rest(x)) * std::log(2.0 + std::hypot(x.x, x.y)); },
        base, gl);
    out.sq_weighted = shells(
        [&](Vec2 x) {
            const double r = safe_rest(x);
            return r * r * std::log(2.0 + std::hypot(x.x, x.y));
        },
        base, gl);

    // Equal-area Cartesian grid covering at least unit area around the charges.
    const double half = 2.0 * std::max(base, 1.0);
    const double step = 2.0 * half / kRearrangementCells;
    std::vector<double> abs_vals, sq_vals;
    abs_vals.reserve(static_cast<std::size_t>(kRearrangementCells) * kRearrangementCells);
    sq_vals.reserve(abs_vals.capacity());
    for (int i = 0; i < kRearrangementCells; ++i)
        for (int j = 0; j < kRearrangementCells; ++j) {
            const double r = safe_rest({-half + (i + 0.5) * step, -half + (j + 0.5) * step});
            abs_vals.push_back(std::abs(r));
            sq_vals.push_back(r * r);
        }
    out.rearranged_abs = rearranged_log_integral(std::move(abs_vals), step * step);
    out.rearranged_sq = rearranged_log_integral(std::move(sq_vals), step * step);

    out.notes.push_back(
        "relative boundedness of V_reg and compactness of V_reg^2 are assumed: Gaussian clouds "
        "give bounded potentials decaying like 1/|x|");
    out.notes.push_back("rearrangement integrals are grid estimates, not bounds");
    out.theorem_applicable = out.neutral && out.dipole_nonzero && out.abs_weighted.converged &&
                             out.sq_weighted.converged && std::isfinite(out.rearranged_abs) &&
                             std::isfinite(out.rearranged_sq);
    return out;
}

}  // namespace gapedge::charge
