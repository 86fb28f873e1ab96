#include "gapedge/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "gapedge/errors.hpp"

namespace gapedge::linalg {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

// ---------------------------------------------------------------------------
// SymTridiag / Matrix / BlockTridiag plumbing

void SymTridiag::validate() const {
    if (diag.empty()) throw InvalidInput("SymTridiag: empty matrix");
    if (offdiag.size() + 1 != diag.size())
        throw InvalidInput("SymTridiag: offdiag must have length diag.size()-1");
    if (!all_finite(diag) || !all_finite(offdiag))
        throw InvalidInput("SymTridiag: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

void BlockTridiag::validate() const {
    if (block_size == 0) throw InvalidInput("BlockTridiag: block size must be positive");
    if (diagonal.empty()) throw InvalidInput("BlockTridiag: no blocks");
    if (upper.size() + 1 != diagonal.size())
        throw InvalidInput("BlockTridiag: need exactly one fewer off-diagonal block");
    for (const auto& d : diagonal) {
        if (d.rows() != block_size || d.cols() != block_size)
            throw InvalidInput("BlockTridiag: diagonal block has wrong size");
        for (std::size_t i = 0; i < block_size; ++i)
            for (std::size_t j = 0; j < i; ++j) {
                double scale = std::max({1.0, std::abs(d(i, j)), std::abs(d(j, i))});
                if (std::abs(d(i, j) - d(j, i)) > 1e-14 * scale)
                    throw InvalidInput("BlockTridiag: diagonal block not symmetric");
            }
        for (std::size_t i = 0; i < block_size; ++i)
            if (!all_finite(d.row(i))) throw InvalidInput("BlockTridiag: non-finite entry");
    }
    for (const auto& u : upper) {
        if (u.rows() != block_size || u.cols() != block_size)
            throw InvalidInput("BlockTridiag: off-diagonal block has wrong size");
        for (std::size_t i = 0; i < block_size; ++i)
            if (!all_finite(u.row(i))) throw InvalidInput("BlockTridiag: non-finite entry");
    }
}

Matrix BlockTridiag::to_dense() const {
    const std::size_t s = block_size;
    Matrix a(dimension(), dimension());
    for (std::size_t b = 0; b < num_blocks(); ++b) {
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) a(b * s + i, b * s + j) = diagonal[b](i, j);
        if (b + 1 < num_blocks()) {
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t j = 0; j < s; ++j) {
                    a(b * s + i, (b + 1) * s + j) = upper[b](i, j);
                    a((b + 1) * s + j, b * s + i) = upper[b](i, j);
                }
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Sturm sequences

std::size_t sturm_count(const SymTridiag& t, double shift) {
    t.validate();
    if (!std::isfinite(shift)) throw InvalidInput("sturm_count: non-finite shift");
    std::size_t count = 0;
    double q = t.diag[0] - shift;
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = kSturmZeroPivot;
        if (q < 0.0) ++count;
        if (i + 1 == t.size()) break;
        const double e = t.offdiag[i];
        q = (t.diag[i + 1] - shift) - (e * e) / q;
    }
    return count;
}

std::vector<double> eigen_tridiag(const SymTridiag& t, std::size_t k) {
    t.validate();
    const std::size_t n = t.size();
    if (k == 0 || k > n) throw InvalidInput("eigen_tridiag: k must lie in [1, dimension]");

    // Gershgorin enclosure.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    lo -= pad;
    hi += pad;

    std::vector<double> out;
    out.reserve(k);
    double left = lo;
    for (std::size_t j = 0; j < k; ++j) {
        // Invariant: count(a) <= j, count(b) >= j+1.
        double a = left;
        double b = hi;
        while (true) {
            const double width_tol =
                std::max(kBisectionTol, 4.0 * std::numeric_limits<double>::epsilon() *
                                            std::max(std::abs(a), std::abs(b)));
            if (b - a <= width_tol) break;
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (sturm_count(t, mid) >= j + 1)
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5 * (a + b));
        left = a;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bunch-Kaufman symmetric indefinite factorization for dense blocks

namespace {

constexpr double kBkAlpha = 0.64038820320220756872;  // (1 + sqrt(17)) / 8

struct BunchKaufman {
    std::size_t n = 0;
    Matrix l;
    std::vector<double> d_diag;
    std::vector<double> d_sub;
    std::vector<unsigned char> pivot2;  // set at the first index of a 2x2 pivot
    std::vector<std::size_t> perm;      // P A P^T = L D L^T, (PAP^T)_ij = A_{perm i, perm j}
    bool exact_zero = false;
};

void swap_symmetric(Matrix& w, std::size_t a, std::size_t b) {
    const std::size_t n = w.rows();
    for (std::size_t j = 0; j < n; ++j) std::swap(w(a, j), w(b, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(w(i, a), w(i, b));
}

BunchKaufman bunch_kaufman(Matrix w) {
    BunchKaufman f;
    const std::size_t n = w.rows();
    f.n = n;
    f.l = Matrix::identity(n);
    f.d_diag.assign(n, 0.0);
    f.d_sub.assign(n, 0.0);
    f.pivot2.assign(n, 0);
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});

    std::size_t k = 0;
    while (k < n) {
        const double absakk = std::abs(w(k, k));
        std::size_t imax = k;
        double colmax = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(w(i, k)) > colmax) {
                colmax = std::abs(w(i, k));
                imax = i;
            }
        }
        if (std::max(absakk, colmax) == 0.0) {
            f.exact_zero = true;
            f.d_diag[k] = 0.0;
            ++k;
            continue;
        }

        std::size_t kp = k;
        std::size_t step = 1;
        if (absakk < kBkAlpha * colmax) {
            double rowmax = 0.0;
            for (std::size_t j = k; j < n; ++j)
                if (j != imax) rowmax = std::max(rowmax, std::abs(w(imax, j)));
            if (absakk * rowmax >= kBkAlpha * colmax * colmax) {
                kp = k;
            } else if (std::abs(w(imax, imax)) >= kBkAlpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                step = 2;
            }
        }

        const std::size_t kk = k + step - 1;
        if (kp != kk) {
            swap_symmetric(w, kk, kp);
            for (std::size_t j = 0; j < k; ++j) std::swap(f.l(kk, j), f.l(kp, j));
            std::swap(f.perm[kk], f.perm[kp]);
        }

        if (step == 1) {
            const double d = w(k, k);
            f.d_diag[k] = d;
            for (std::size_t i = k + 1; i < n; ++i) f.l(i, k) = w(i, k) / d;
            for (std::size_t i = k + 1; i < n; ++i) {
                const double li = f.l(i, k);
                if (li == 0.0) continue;
                for (std::size_t j = k + 1; j <= i; ++j) w(i, j) -= li * w(j, k);
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < i; ++j) w(j, i) = w(i, j);
        } else {
            const double a = w(k, k);
            const double b = w(k + 1, k);
            const double c = w(k + 1, k + 1);
            const double det = a * c - b * b;
            f.d_diag[k] = a;
            f.d_diag[k + 1] = c;
            f.d_sub[k] = b;
            f.pivot2[k] = 1;
            for (std::size_t i = k + 2; i < n; ++i) {
                const double x = w(i, k);
                const double y = w(i, k + 1);
                f.l(i, k) = (c * x - b * y) / det;
                f.l(i, k + 1) = (a * y - b * x) / det;
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                const double l1 = f.l(i, k);
                const double l2 = f.l(i, k + 1);
                for (std::size_t j = k + 2; j <= i; ++j) w(i, j) -= l1 * w(j, k) + l2 * w(j, k + 1);
            }
            for (std::size_t i = k + 2; i < n; ++i)
                for (std::size_t j = k + 2; j < i; ++j) w(j, i) = w(i, j);
        }
        k += step;
    }
    return f;
}

void add_inertia(const BunchKaufman& f, double zero_tol, Inertia& acc) {
    auto classify = [&](double v) {
        if (std::abs(v) <= zero_tol)
            ++acc.n_zero;
        else if (v < 0.0)
            ++acc.n_minus;
        else
            ++acc.n_plus;
    };
    for (std::size_t k = 0; k < f.n;) {
        if (f.pivot2[k]) {
            const double a = f.d_diag[k];
            const double c = f.d_diag[k + 1];
            const double b = f.d_sub[k];
            const double mid = 0.5 * (a + c);
            const double rad = std::hypot(0.5 * (a - c), b);
            classify(mid - rad);
            classify(mid + rad);
            k += 2;
        } else {
            classify(f.d_diag[k]);
            k += 1;
        }
    }
}

/// X = A^{-1} B for the factored A; B has f.n rows.
Matrix bk_solve(const BunchKaufman& f, const Matrix& rhs) {
    const std::size_t n = f.n;
    const std::size_t m = rhs.cols();
    Matrix y(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < m; ++c) y(i, c) = rhs(f.perm[i], c);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double lij = f.l(i, j);
            if (lij == 0.0) continue;
            for (std::size_t c = 0; c < m; ++c) y(i, c) -= lij * y(j, c);
        }

    for (std::size_t k = 0; k < n;) {
        if (f.pivot2[k]) {
            const double a = f.d_diag[k];
            const double c2 = f.d_diag[k + 1];
            const double b = f.d_sub[k];
            const double det = a * c2 - b * b;
            for (std::size_t c = 0; c < m; ++c) {
                const double u = y(k, c);
                const double v = y(k + 1, c);
                y(k, c) = (c2 * u - b * v) / det;
                y(k + 1, c) = (a * v - b * u) / det;
            }
            k += 2;
        } else {
            const double d = f.d_diag[k];
            for (std::size_t c = 0; c < m; ++c) y(k, c) /= d;
            k += 1;
        }
    }

    for (std::size_t ii = n; ii-- > 0;)
        for (std::size_t j = ii + 1; j < n; ++j) {
            const double lji = f.l(j, ii);
            if (lji == 0.0) continue;
            for (std::size_t c = 0; c < m; ++c) y(ii, c) -= lji * y(j, c);
        }

    Matrix x(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < m; ++c) x(f.perm[i], c) = y(i, c);
    return x;
}

std::optional<Inertia> inertia_sweep(const BlockTridiag& b, double shift,
                                     const std::vector<double>& row_scale) {
    const std::size_t s = b.block_size;
    const std::size_t nb = b.num_blocks();
    Inertia acc;

    Matrix schur = b.diagonal[0];
    for (std::size_t i = 0; i < s; ++i) schur(i, i) -= shift;

    for (std::size_t blk = 0; blk < nb; ++blk) {
        BunchKaufman f = bunch_kaufman(schur);
        if (f.exact_zero) return std::nullopt;
        add_inertia(f, kInertiaZeroRel * row_scale[blk], acc);
        if (blk + 1 == nb) break;

        // Only the nonzero columns of the coupling block feed the update.
        const Matrix& up = b.upper[blk];
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < s; ++c) {
            bool nz = false;
            for (std::size_t r = 0; r < s && !nz; ++r) nz = up(r, c) != 0.0;
            if (nz) cols.push_back(c);
        }
        Matrix next = b.diagonal[blk + 1];
        for (std::size_t i = 0; i < s; ++i) next(i, i) -= shift;
        if (!cols.empty()) {
            Matrix rhs(s, cols.size());
            for (std::size_t r = 0; r < s; ++r)
                for (std::size_t c = 0; c < cols.size(); ++c) rhs(r, c) = up(r, cols[c]);
            const Matrix x = bk_solve(f, rhs);
            for (std::size_t a = 0; a < cols.size(); ++a)
                for (std::size_t c = a; c < cols.size(); ++c) {
                    double acc_v = 0.0;
                    for (std::size_t r = 0; r < s; ++r) acc_v += rhs(r, a) * x(r, c);
                    next(cols[a], cols[c]) -= acc_v;
                    if (c != a) next(cols[c], cols[a]) -= acc_v;
                }
        }
        schur = std::move(next);
    }
    return acc;
}

}  // namespace

Inertia dense_inertia(const Matrix& a, double zero_tol) {
    if (a.rows() != a.cols()) throw InvalidInput("dense_inertia: matrix must be square");
    BunchKaufman f = bunch_kaufman(a);
    Inertia acc;
    add_inertia(f, zero_tol, acc);
    return acc;
}

Inertia ldlt_inertia(const BlockTridiag& b, double shift) {
    b.validate();
    if (!std::isfinite(shift)) throw InvalidInput("ldlt_inertia: non-finite shift");

    const std::size_t nb = b.num_blocks();
    std::vector<double> row_scale(nb, 0.0);
    for (std::size_t i = 0; i < nb; ++i) {
        double m = 0.0;
        const Matrix& d = b.diagonal[i];
        for (std::size_t r = 0; r < b.block_size; ++r)
            for (std::size_t c = 0; c < b.block_size; ++c)
                m = std::max(m, std::abs(d(r, c) - (r == c ? shift : 0.0)));
        if (i < b.upper.size()) m = std::max(m, b.upper[i].max_abs());
        if (i > 0) m = std::max(m, b.upper[i - 1].max_abs());
        row_scale[i] = m;
    }

    // Retry policy: nudge the shift by a few ulps-scaled steps on exact breakdown.
    const double nudge = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(shift));
    for (int attempt = 0; attempt <= kInertiaRetries; ++attempt) {
        const double s = shift + attempt * nudge;
        if (auto r = inertia_sweep(b, s, row_scale)) return *r;
    }
    throw NumericalBreakdown("ldlt_inertia: exact zero pivot persists after retries", shift);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

std::vector<double> integrate_ode(const OdeRhs& rhs, double t0, double t1,
                                  std::span<const double> y0, double rel_tol, OdeStats* stats) {
    if (!(rel_tol >= kMinRelTol && rel_tol <= kMaxRelTol))
        throw InvalidInput("integrate_ode: rel_tol outside [1e-13, 1e-3]");
    if (!std::isfinite(t0) || !std::isfinite(t1) || !all_finite(y0))
        throw InvalidInput("integrate_ode: non-finite input");

    const std::size_t n = y0.size();
    std::vector<double> y(y0.begin(), y0.end());
    if (t0 == t1 || n == 0) return y;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double atol = rel_tol;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span_len = std::abs(t1 - t0);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

    auto err_norm = [&](std::span<const double> ya, std::span<const double> yb,
                        std::span<const double> e) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = atol + rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            acc += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(acc / static_cast<double>(n));
    };

    double t = t0;
    rhs(t, y, k1);

    // Initial step (Hairer, Norsett & Wanner heuristic).
    double h;
    {
        const std::vector<double> zero(n, 0.0);
        const double d0 = err_norm(y, y, y);
        const double d1 = err_norm(y, y, k1);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span_len);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dir * h0 * k1[i];
        rhs(t + dir * h0, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) k3[i] = (k2[i] - k1[i]) / h0;
        const double d2 = err_norm(y, y, k3);
        const double h1 = std::max(d1, d2) <= 1e-15
                              ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
        h = std::min(h, span_len);
    }

    constexpr double beta = 0.04;
    constexpr double alpha = 0.2 - 0.75 * beta;
    constexpr double safety = 0.9;
    constexpr double fac_min = 0.2;
    constexpr double fac_max = 10.0;
    constexpr std::size_t max_steps = 50'000'000;
    double err_prev = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;
    OdeStats local;

    while (dir * (t1 - t) > 0.0) {
        if (++steps > max_steps) throw StiffnessError("integrate_ode: step budget exhausted", t);
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < hmin) throw StiffnessError("integrate_ode: step size underflow", t);
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + hs, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const double t_new = last ? t1 : t + hs;
        rhs(t_new, ynew, k7);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
        const double err = err_norm(y, ynew, tmp);
        if (!std::isfinite(err)) {
            h *= fac_min;
            last_rejected = true;
            ++local.rejected;
            continue;
        }

        if (err <= 1.0) {
            double fac = safety * std::pow(std::max(err, 1e-10), -alpha) * std::pow(err_prev, beta);
            fac = std::clamp(fac, fac_min, fac_max);
            if (last_rejected) fac = std::min(fac, 1.0);
            err_prev = std::max(err, 1e-4);
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);
            h *= fac;
            last_rejected = false;
            ++local.accepted;
            if (last) break;
        } else {
            const double fac = std::max(fac_min, safety * std::pow(err, -alpha));
            h *= fac;
            last_rejected = true;
            ++local.rejected;
        }
    }
    if (stats) *stats = local;
    return y;
}

// ---------------------------------------------------------------------------
// Brent root finding

double brent_root(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("brent_root: tol must be positive");
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0))
        throw BracketError("brent_root: f(a) and f(b) must have opposite signs");

    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Least squares line

LineFit linfit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidInput("linfit: length mismatch");
    if (xs.size() < 3) throw InvalidInput("linfit: need at least 3 points");
    if (!all_finite(xs) || !all_finite(ys)) throw InvalidInput("linfit: non-finite sample");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double scale = 0.0;
    for (double x : xs) scale = std::max(scale, std::abs(x));
    if (sxx <= 1e-24 * std::max(1.0, scale * scale) * n)
        throw InvalidInput("linfit: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

}  // namespace gapedge::linalg
