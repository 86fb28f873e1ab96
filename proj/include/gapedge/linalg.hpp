#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gapedge::linalg {

// Module constants. Exposed read-only so reports can echo them.
inline constexpr double kSturmZeroPivot = 1e-300;
inline constexpr double kBisectionTol = 1e-12;
inline constexpr double kInertiaZeroRel = 1e-11;
inline constexpr int kInertiaRetries = 3;
inline constexpr double kMinRelTol = 1e-13;
inline constexpr double kMaxRelTol = 1e-3;

/// Real symmetric tridiagonal matrix; offdiag[i] couples rows i and i+1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const noexcept { return diag.size(); }
    /// Throws InvalidInput on length mismatch or non-finite entries.
    void validate() const;
};

/// Small dense row-major matrix used for the blocks of a BlockTridiag.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    Matrix transpose() const;
    double max_abs() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric block tridiagonal matrix. upper[i] is the block in block-row i,
/// block-column i+1; the lower blocks are its transposes.
struct BlockTridiag {
    std::size_t block_size = 0;
    std::vector<Matrix> diagonal;
    std::vector<Matrix> upper;

    std::size_t num_blocks() const noexcept { return diagonal.size(); }
    std::size_t dimension() const noexcept { return block_size * diagonal.size(); }
    void validate() const;
    /// Dense copy, for tests and small problems only.
    Matrix to_dense() const;
};

struct Inertia {
    std::size_t n_minus = 0;
    std::size_t n_zero = 0;
    std::size_t n_plus = 0;

    std::size_t total() const noexcept { return n_minus + n_zero + n_plus; }
    friend bool operator==(const Inertia&, const Inertia&) = default;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Number of eigenvalues of `t` strictly below `shift`.
std::size_t sturm_count(const SymTridiag& t, double shift);

/// The k smallest eigenvalues, ascending, each bisected to kBisectionTol.
std::vector<double> eigen_tridiag(const SymTridiag& t, std::size_t k);

/// Inertia of (b - shift*I) from a block LDL^T sweep. Each Schur complement
/// is factored with Bunch-Kaufman 1x1/2x2 pivoting; Haynsworth additivity
/// sums the block inertias. A pivot with |d| below kInertiaZeroRel times the
/// max-norm of its block row counts toward n_zero.
Inertia ldlt_inertia(const BlockTridiag& b, double shift);

/// Dense symmetric inertia through the same Bunch-Kaufman kernel.
Inertia dense_inertia(const Matrix& a, double zero_tol);

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Dormand-Prince 5(4) with PI step control. Integrates from t0 to t1
/// (either direction). Mixed error norm with atol = rel_tol.
std::vector<double> integrate_ode(const OdeRhs& rhs, double t0, double t1,
                                  std::span<const double> y0, double rel_tol,
                                  OdeStats* stats = nullptr);

/// Brent's method. Requires f(a) and f(b) of opposite sign (or a zero at an end).
double brent_root(const std::function<double(double)>& f, double a, double b, double tol);

/// Ordinary least squares y = slope*x + intercept.
LineFit linfit(std::span<const double> xs, std::span<const double> ys);

}  // namespace gapedge::linalg
