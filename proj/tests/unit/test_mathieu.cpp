#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gapedge/errors.hpp"
#include "gapedge/mathieu.hpp"
#include "oracles/jacobi_dense.hpp"
#include "oracles/mathieu_cf.hpp"

using namespace gapedge;

TEST_CASE("assemble builds the Fourier tridiagonal") {
    auto t = mathieu::assemble({2.0, mathieu::Problem::min_modes(2.0)});
    CHECK(t.size() == 2 * mathieu::Problem::min_modes(2.0) + 1);
    for (double e : t.offdiag) CHECK(e == -1.0);

    // Small cutoff below the admissible minimum is rejected.
    CHECK_THROWS_AS(mathieu::assemble({2.0, 2}), InvalidInput);
    CHECK_THROWS_AS(mathieu::assemble({-1.0, 20}), InvalidInput);

    auto z = mathieu::assemble({0.0, 8});
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double k = static_cast<double>(i) - 8.0;
        CHECK(z.diag[i] == k * k);
    }
    for (double e : z.offdiag) CHECK(e == 0.0);
}

TEST_CASE("K=2 layout at p=2") {
    // Built by hand: the library refuses K < ceil(sqrt(2p)) + 8, so check the
    // pattern on the central five entries of a valid truncation.
    auto t = mathieu::assemble({2.0, 10});
    const std::vector<double> centre(t.diag.begin() + 8, t.diag.begin() + 13);
    CHECK(centre == std::vector<double>{4, 1, 0, 1, 4});
}

TEST_CASE("free spectrum is k^2") {
    auto sp = mathieu::spectrum({0.0, 8});
    const std::vector<double> expect{0, 1, 1, 4, 4, 9, 9, 16, 16, 25};
    REQUIRE(sp.eigenvalues.size() >= expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(sp.eigenvalues[i] - expect[i]) < 1e-12);
    CHECK(sp.rate == 0.0);
    CHECK(mathieu::rate(0.0) == 0.0);
}

TEST_CASE("lowest eigenvalue matches the continued-fraction oracle") {
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        const double lam0 = mathieu::lowest(p, 1)[0];
        CHECK(std::abs(lam0 - oracle::mathieu_a0(2.0 * p) / 4.0) < 1e-8);
    }
    CHECK(std::abs(mathieu::lowest(2.0, 1)[0] + 1.07013) < 1e-5);
}

TEST_CASE("small coupling follows second-order perturbation") {
    const double p = 0.01;
    const double lam0 = mathieu::lowest(p, 1)[0];
    CHECK(std::abs(lam0 / (-p * p / 2.0) - 1.0) < 0.02);
    CHECK(std::abs(mathieu::rate(p) * std::numbers::pi * std::sqrt(2.0) / p - 1.0) < 0.02);
    auto ev = mathieu::lowest(p, 3);
    CHECK(ev[1] > 0.0);
}

TEST_CASE("rate at p=2 has a single negative channel") {
    auto sp = mathieu::spectrum(mathieu::Problem::with_default_modes(2.0));
    CHECK(sp.eigenvalues[0] < 0.0);
    CHECK(sp.eigenvalues[1] > 0.0);
    // 0.32926 is the commonly quoted 5-digit value; sqrt(1.07013)/pi = 0.329282.
    CHECK(std::abs(sp.rate - 0.32926) < 1e-4);
    CHECK(std::abs(sp.rate - std::sqrt(-oracle::mathieu_a0(4.0) / 4.0) / std::numbers::pi) < 1e-9);
}

TEST_CASE("truncated matrix agrees with a dense solve") {
    const auto t = mathieu::assemble({5.0, 12});
    std::vector<std::vector<double>> a(t.size(), std::vector<double>(t.size(), 0.0));
    for (std::size_t i = 0; i < t.size(); ++i) a[i][i] = t.diag[i];
    for (std::size_t i = 0; i + 1 < t.size(); ++i) a[i][i + 1] = a[i + 1][i] = t.offdiag[i];
    const auto ref = oracle::jacobi_eigenvalues(a);
    const auto ev = linalg::eigen_tridiag(t, 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-10);
}

TEST_CASE("evenness, positivity, continuity, truncation stability") {
    for (double p : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(mathieu::rate(p) == mathieu::rate(-p));
        // Sign flip of the coupling: a diagonal +-1 similarity on the matrix.
        const auto plus = mathieu::assemble({p, 20});
        auto minus = plus;
        for (auto& e : minus.offdiag) e = -e;
        const auto a = linalg::eigen_tridiag(plus, 10);
        const auto b = linalg::eigen_tridiag(minus, 10);
        for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);

        CHECK(mathieu::rate(p) > 0.0);
        CHECK(std::abs(mathieu::rate(p + 1e-6) - mathieu::rate(p)) < 1e-4);

        auto sp = mathieu::spectrum(mathieu::Problem::with_default_modes(p));
        auto bigger = mathieu::spectrum({p, 2 * sp.problem.n_modes});
        CHECK(std::abs(bigger.rate - sp.rate) < 1e-9);
    }
    for (double p : {1e-4, 0.03, 0.3, 3.0, 12.0, 40.0}) CHECK(mathieu::rate(p) > 0.0);
}

TEST_CASE("eigenvalues ascend and include every negative one") {
    auto sp = mathieu::spectrum(mathieu::Problem::with_default_modes(40.0));
    for (std::size_t i = 1; i < sp.eigenvalues.size(); ++i)
        CHECK(sp.eigenvalues[i - 1] <= sp.eigenvalues[i]);
    const auto t = mathieu::assemble(sp.problem);
    const std::size_t neg = linalg::sturm_count(t, 0.0);
    CHECK(sp.eigenvalues.size() == neg + mathieu::kExtraPositive);
    CHECK(sp.eigenvalues.front() >= -40.0);
}
