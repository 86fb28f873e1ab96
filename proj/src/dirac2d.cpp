#include "gapedge/dirac2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapedge/errors.hpp"
#include "gapedge/mathieu.hpp"
#include "gapedge/parallel.hpp"

namespace gapedge::dirac2d {

namespace {

bool half_integer(double k) {
    const double twice = 2.0 * k;
    return std::abs(twice - std::round(twice)) < 1e-12 &&
           static_cast<long>(std::round(twice)) % 2 != 0;
}

// Lowest eigenvalue of -d^2 - p cos on angular modes l = kappa - 1/2 with
// |kappa| <= cutoff, which is the set l in [-cutoff - 1/2, cutoff - 1/2].
double truncated_lowest(double p, double cutoff) {
    const long lo = std::lround(-cutoff - 0.5), hi = std::lround(cutoff - 0.5);
    linalg::SymTridiag t;
    for (long l = lo; l <= hi; ++l) t.diag.push_back(static_cast<double>(l * l));
    t.offdiag.assign(t.diag.size() - 1, -0.5 * p);
    return linalg::eigen_tridiag(t, 1)[0];
}

}  // namespace

void Config::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("dirac2d: m must be positive");
    if (!(d_abs >= 0.0) || !std::isfinite(d_abs))
        throw InvalidInput("dirac2d: |d| must be finite and >= 0");
    if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
        throw InvalidInput("dirac2d: need 0 < r_min < r_max");
    if (n_r < kMinRadialNodes)
        throw InvalidInput("dirac2d: n_r must be >= " + std::to_string(kMinRadialNodes));
    if (!half_integer(k_max) || k_max < kMinChannelCutoff)
        throw InvalidInput("dirac2d: k_max must be a half-integer >= 5/2");
    for (std::size_t i = 0; i < E_grid.size(); ++i) {
        if (!(E_grid[i] > 0.0 && E_grid[i] < m))
            throw InvalidInput("dirac2d: energies must lie in (0, m)");
        if (i > 0 && !(E_grid[i] > E_grid[i - 1]))
            throw InvalidInput("dirac2d: energies must be strictly ascending");
    }
}

std::size_t Config::channels() const {
    return static_cast<std::size_t>(std::lround(2.0 * k_max)) + 1;
}

double settled_cutoff(double p) {
    double k = kMinChannelCutoff;
    if (p == 0.0) return k;
    double prev = truncated_lowest(p, k);
    for (int guard = 0; guard < 200; ++guard) {
        const double next = truncated_lowest(p, k + 2.0);
        if (std::abs(next - prev) < kCutoffSettleTol) return k;
        k += 2.0;
        prev = next;
    }
    throw TruncationError("dirac2d: channel cutoff did not settle");
}

Config with_defaults(Config c) {
    if (c.r_min == 0.0) c.r_min = 1e-3 / c.m;
    if (c.r_max == 0.0) {
        const double e_max = c.E_grid.empty() ? 0.99 * c.m : c.E_grid.back();
        c.r_max = kOuterRadiusFactor / std::sqrt(c.m * c.m - e_max * e_max);
    }
    if (c.k_max == 0.0) c.k_max = settled_cutoff(2.0 * c.m * c.d_abs);
    return c;
}

linalg::BlockTridiag assemble(const Config& c) {
    c.validate();
    const std::size_t n = c.n_r, nk = c.channels(), s = 2 * nk;
    const double t0 = std::log(c.r_min);
    const double h = (std::log(c.r_max) - t0) / static_cast<double>(n);
    // Integer node i sits at t0 + (i + 1/2) h, half node i at t0 + i h, so half
    // node i is the left neighbour of integer node i.
    auto t_int = [&](std::size_t i) { return t0 + (static_cast<double>(i) + 0.5) * h; };
    auto t_half = [&](std::size_t i) { return t0 + static_cast<double>(i) * h; };
    auto w = [](double t) { return std::exp(-0.5 * t); };
    auto kappa_of = [&](std::size_t ch) { return static_cast<double>(ch) - c.k_max; };
    auto block_of = [&](std::size_t i) { return n - 1 - i; };
    auto xi = [](std::size_t ch) { return 2 * ch; };      // integer-node slot
    auto yi = [](std::size_t ch) { return 2 * ch + 1; };  // half-node slot

    linalg::BlockTridiag b;
    b.block_size = s;
    b.diagonal.assign(n, linalg::Matrix(s, s));
    b.upper.assign(n - 1, linalg::Matrix(s, s));

    // Adds a symmetric entry between (radial i, slot a) and (radial j, slot c),
    // where j is i or i + 1.
    auto put = [&](std::size_t i, std::size_t a, std::size_t j, std::size_t cslot, double v) {
        if (j == i) {
            auto& d = b.diagonal[block_of(i)];
            d(a, cslot) += v;
            if (a != cslot) d(cslot, a) += v;
        } else {
            // Block of j = i + 1 is block_of(i) - 1, so the pair lives in
            // upper[block_of(j)] with row = j's slot, column = i's slot.
            b.upper[block_of(j)](cslot, a) += v;
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double tx = t_int(i), ty = t_half(i);
        const double rx = std::exp(tx), ry = std::exp(ty);
        for (std::size_t ch = 0; ch < nk; ++ch) {
            const double kappa = kappa_of(ch);
            const double sg = kappa > 0 ? 1.0 : -1.0;
            const double a = std::abs(kappa);
            put(i, xi(ch), i, xi(ch), sg * c.m);
            put(i, yi(ch), i, yi(ch), -sg * c.m);
            // Staggered -d/dr - a/r from half nodes onto integer node i.
            const double left = w(tx) * w(ty) / h - 0.5 * a / rx;
            put(i, xi(ch), i, yi(ch), sg * left);
            if (i + 1 < n) {
                const double right = -w(tx) * w(t_half(i + 1)) / h - 0.5 * a / rx;
                put(i, xi(ch), i + 1, yi(ch), sg * right);
            }
        }
        if (c.d_abs == 0.0) continue;
        const double vx = 0.5 * c.d_abs / (rx * rx), vy = 0.5 * c.d_abs / (ry * ry);
        for (std::size_t ch = 0; ch + 1 < nk; ++ch) {
            const double kappa = kappa_of(ch);
            if (kappa < 0 && kappa + 1 > 0) {
                // kappa = -1/2 and +1/2 live on opposite grids: couple each
                // integer node to the average of its two half-node neighbours.
                const std::size_t neg = ch, pos = ch + 1;
                for (auto [from, to] : {std::pair{pos, neg}, std::pair{neg, pos}}) {
                    put(i, xi(from), i, yi(to), 0.5 * vx);
                    if (i + 1 < n) put(i, xi(from), i + 1, yi(to), 0.5 * vx);
                }
            } else {
                put(i, xi(ch), i, xi(ch + 1), vx);
                put(i, yi(ch), i, yi(ch + 1), vy);
            }
        }
    }
    return b;
}

namespace {

std::size_t minus_count(const linalg::BlockTridiag& h, double m, double shift, double inward) {
    auto in = linalg::ldlt_inertia(h, shift);
    if (in.n_zero > 0) in = linalg::ldlt_inertia(h, shift + inward * kReshiftRel * m);
    if (in.n_zero > 0)
        throw NumericalBreakdown("dirac2d: zero pivot survives the re-shift", shift);
    return in.n_minus;
}

}  // namespace

std::size_t count_between(const linalg::BlockTridiag& h, double m, double lo, double hi) {
    if (!(lo < hi)) throw InvalidInput("dirac2d: need lo < hi");
    const std::size_t upper = minus_count(h, m, hi, -1.0);
    const std::size_t lower = minus_count(h, m, lo, +1.0);
    return upper >= lower ? upper - lower : 0;
}

std::size_t count_in_gap(const linalg::BlockTridiag& h, double m, double E) {
    if (!(E > 0.0 && E < m)) throw InvalidInput("dirac2d: E must lie in (0, m)");
    return count_between(h, m, -E, E);
}

std::size_t count_in_gap(const Config& c, double E) {
    return count_in_gap(assemble(c), c.m, E);
}

namespace {

std::vector<std::size_t> counts_on_grid(const Config& c) {
    const auto h = assemble(c);
    std::vector<std::size_t> out(c.E_grid.size());
    parallel_for(out.size(), [&](std::size_t k) { out[k] = count_in_gap(h, c.m, c.E_grid[k]); });
    return out;
}

linalg::LineFit fit_counts(const Config& c, const std::vector<std::size_t>& counts) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        xs.push_back(std::abs(std::log(c.m - c.E_grid[k])));
        ys.push_back(static_cast<double>(counts[k]));
    }
    return linalg::linfit(xs, ys);
}

}  // namespace

GapCountCurve gap_slope(const Config& c) {
    c.validate();
    if (c.E_grid.size() < 3) throw InvalidInput("dirac2d: need at least 3 energies to fit");
    GapCountCurve out;
    out.energies = c.E_grid;
    out.counts = counts_on_grid(c);
    out.fit = fit_counts(c, out.counts);

    Config coarse = c;
    coarse.n_r = std::max(kMinRadialNodes, c.n_r / 2);
    out.coarse_fit = fit_counts(coarse, counts_on_grid(coarse));

    const double p = 2.0 * c.m * c.d_abs;
    out.predicted = mathieu::rate(p);
    out.grid_converged =
        std::abs(out.fit.slope - out.coarse_fit.slope) <= out.coarse_fit.slope_stderr;
    out.cutoff_settled = c.k_max >= settled_cutoff(p);
    return out;
}

}  // namespace gapedge::dirac2d
