#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gapedge/charge_model.hpp"
#include "gapedge/errors.hpp"

using namespace gapedge;
using namespace gapedge::charge;

namespace {

Distribution two_point(double nu, double a) {
    return {{{{a, 0.0}, nu}, {{-a, 0.0}, -nu}}, {}};
}

Distribution quadrupole(double nu, double a) {
    return {{{{a, 0.0}, nu}, {{-a, 0.0}, nu}, {{0.0, a}, -nu}, {{0.0, -a}, -nu}}, {}};
}

Distribution random_distribution(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-3.0, 3.0), cpl(0.05, 0.45), q(-2.0, 2.0),
        w(0.2, 1.5);
    Distribution d;
    for (int i = 0; i < 3; ++i) d.points.push_back({{pos(rng), pos(rng)}, (i % 2 ? -1 : 1) * cpl(rng)});
    for (int i = 0; i < 2; ++i) d.regulars.push_back({{pos(rng), pos(rng), 0.3 * pos(rng)}, q(rng), w(rng)});
    return d;
}

Distribution rotated(const Distribution& d, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    Distribution out = d;
    for (auto& p : out.points) p.position = {c * p.position.x - s * p.position.y, s * p.position.x + c * p.position.y};
    for (auto& g : out.regulars) {
        const double x = g.center[0], y = g.center[1];
        g.center[0] = c * x - s * y;
        g.center[1] = s * x + c * y;
    }
    return out;
}

}  // namespace

TEST_CASE("validation") {
    CHECK(validate(two_point(0.3, 1.0)).ok);
    auto crit = validate({{{{1.0, 0.0}, 0.5}}, {}});
    CHECK_FALSE(crit.ok);
    REQUIRE(crit.violations.size() == 1);
    CHECK(crit.violations[0].find("critical coupling") != std::string::npos);
    auto dup = validate({{{{1.0, 0.0}, 0.2}, {{1.0, 0.0}, -0.1}}, {}});
    CHECK_FALSE(dup.ok);
    CHECK(dup.violations[0].find("coincident point charges") != std::string::npos);
    CHECK_FALSE(validate({}).ok);
    CHECK_FALSE(validate({{}, {{{0, 0, 0}, 1.0, 0.0}}}).ok);
    CHECK_FALSE(validate({{{{0.0, 0.0}, 0.0}}, {}}).ok);
}

TEST_CASE("moments") {
    const double nu = 0.3, a = 1.25;
    auto m = moments(two_point(nu, a));
    CHECK(m.total_charge == 0.0);
    CHECK(m.dipole.x == 2.0 * a * nu);
    CHECK(m.dipole.y == 0.0);
    CHECK(m.gamma == 2.0 * a);

    m = moments({{}, {{{0, 0, 0}, 1.0, 0.5}}});
    CHECK(m.total_charge == 1.0);
    CHECK(m.dipole.x == 0.0);
    CHECK(m.dipole.y == 0.0);
    CHECK(m.gamma == 0.0);

    m = moments(quadrupole(0.2, 1.0));
    CHECK(m.total_charge == 0.0);
    CHECK(m.dipole.x == 0.0);
    CHECK(m.dipole.y == 0.0);
}

TEST_CASE("potential values") {
    CHECK(std::abs(potential(two_point(0.3, 1.0), {0.0, 1.0})) < 1e-15);
    CHECK(potential({{{{0.0, 0.0}, 0.2}}, {}}, {2.0, 0.0}) == doctest::Approx(0.1));
    CHECK_THROWS_AS(potential(two_point(0.3, 1.0), {1.0, 0.0}), SingularityError);

    const Distribution g{{}, {{{0, 0, 0}, 1.3, 0.4}}};
    CHECK(potential(g, {0.0, 0.0}) == doctest::Approx(1.3 * std::sqrt(2.0 / std::numbers::pi) / 0.4));
    // Far field of a Gaussian at 20 widths: the erf factor is 1 to ~1e-89.
    const double r = 20.0 * 0.4;
    CHECK(std::abs(potential(g, {r, 0.0}) / (1.3 / r) - 1.0) < 1e-10);
    // Continuity at the centre.
    CHECK(potential(g, {1e-6, 0.0}) == doctest::Approx(potential(g, {0.0, 0.0})).epsilon(1e-10));
}

TEST_CASE("rest potential") {
    const double a = 0.7;
    const auto d = two_point(0.3, a);
    for (double t : {10 * a, 100 * a, 1000 * a}) {
        const double r = std::abs(rest_potential(d, {t, 0.0}));
        CHECK(r * t * t * t < 1.0);
        // The pair has no quadrupole; the octupole term is 2 nu a^3 / t^4.
        CHECK(r * std::pow(t, 4) == doctest::Approx(2.0 * 0.3 * a * a * a).epsilon(0.02));
    }
    CHECK(rest_potential(d, {0.3, 0.2}) == 0.0);

    const Distribution reg{{}, {{{0.5, 0.0, 0.2}, 1.0, 0.5}, {{-0.5, 0.0, 0.2}, -1.0, 0.5}}};
    CHECK(rest_potential(reg, {3.0, 1.0}) != regular_potential(reg, {3.0, 1.0}));  // dipole != 0
    const Distribution sym{{}, {{{0, 0, 0.1}, 1.0, 0.5}}};
    for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{4.0, -1.0}})
        CHECK(rest_potential(sym, x) == regular_potential(sym, x));
}

TEST_CASE("linearity over disjoint unions") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-8.0, 8.0);
    for (int k = 0; k < 10; ++k) {
        const auto a = random_distribution(rng), b = random_distribution(rng);
        Distribution u = a;
        u.points.insert(u.points.end(), b.points.begin(), b.points.end());
        u.regulars.insert(u.regulars.end(), b.regulars.begin(), b.regulars.end());
        const auto ma = moments(a), mb = moments(b), mu = moments(u);
        CHECK(mu.total_charge == doctest::Approx(ma.total_charge + mb.total_charge));
        CHECK(mu.dipole.x == doctest::Approx(ma.dipole.x + mb.dipole.x));
        CHECK(mu.dipole.y == doctest::Approx(ma.dipole.y + mb.dipole.y));
        const Vec2 x{pos(rng), pos(rng)};
        CHECK(potential(u, x) == doctest::Approx(potential(a, x) + potential(b, x)));
    }
}

TEST_CASE("rotation covariance") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 10; ++k) {
        const auto d = random_distribution(rng);
        const double phi = 0.37 * (k + 1);
        const auto m = moments(d), mr = moments(rotated(d, phi));
        CHECK(std::abs(mr.dipole.x - (std::cos(phi) * m.dipole.x - std::sin(phi) * m.dipole.y)) < 1e-12);
        CHECK(std::abs(mr.dipole.y - (std::sin(phi) * m.dipole.x + std::cos(phi) * m.dipole.y)) < 1e-12);
        CHECK(std::abs(mr.total_charge - m.total_charge) < 1e-12);
        CHECK(std::abs(mr.gamma - m.gamma) < 1e-12);
    }
}

TEST_CASE("far field of neutral distributions") {
    Distribution d{{{{0.5, 0.2}, 0.3}, {{-0.4, -0.1}, -0.2}}, {{{0.1, 0.3, 0.2}, -0.1, 0.3}}};
    const auto m = moments(d);
    REQUIRE(std::abs(m.total_charge) < 1e-15);
    for (double ang : {0.0, 1.0, 2.5, 4.0}) {
        for (double r : {20.0, 200.0, 2000.0}) {
            const Vec2 x{r * std::cos(ang), r * std::sin(ang)};
            const double v = potential(d, x);
            const double tail = (m.dipole.x * x.x + m.dipole.y * x.y) / (r * r * r);
            CHECK(std::abs(v) * r * r < 1.0);
            CHECK(std::abs(v - tail) * r * r * r < 2.0);
        }
    }
}

TEST_CASE("diagnostics on the reference configurations") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dip = hypothesis_diagnostics(two_point(0.3, 1.0));
    CHECK(dip.neutral);
    CHECK(dip.dipole_nonzero);
    CHECK(dip.abs_weighted.converged);
    CHECK(dip.sq_weighted.converged);
    CHECK(dip.abs_weighted.shells.size() == kMaxShell + 1);
    CHECK(std::isfinite(dip.rearranged_abs));
    CHECK(dip.theorem_applicable);
    // R = O(|x|^-3): shell contributions fall roughly by half per doubling.
    const auto& sh = dip.abs_weighted.shells;
    for (std::size_t j = 3; j < sh.size(); ++j) CHECK(sh[j] < 0.7 * sh[j - 1]);

    const auto single = hypothesis_diagnostics({{{{0.2, 0.1}, 0.2}}, {}});
    CHECK_FALSE(single.neutral);
    CHECK_FALSE(single.abs_weighted.converged);
    CHECK_FALSE(single.theorem_applicable);

    const auto quad = hypothesis_diagnostics(quadrupole(0.2, 1.0));
    CHECK(quad.neutral);
    CHECK_FALSE(quad.dipole_nonzero);
    CHECK_FALSE(quad.theorem_applicable);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("three diagnostics took " << secs << " s");
    CHECK_THROWS_AS(hypothesis_diagnostics({{{{0.0, 0.0}, 0.7}}, {}}), InvalidInput);
}

TEST_CASE("rearrangement estimate of a disk indicator") {
    // A regular cloud gives a bounded R; the log-weighted rearranged integral
    // is bounded by sup|R| * int_0^1 log(1/t) dt = sup|R|.
    const Distribution g{{{{0.3, 0.0}, 0.2}, {{-0.3, 0.0}, -0.2}}, {{{0, 0, 0.5}, 0.4, 0.3}, {{0, 0, -0.5}, -0.4, 0.3}}};
    const auto d = hypothesis_diagnostics(g);
    CHECK(d.rearranged_abs > 0.0);
    double sup = 0.0;
    for (double x = -3; x <= 3; x += 0.05)
        for (double y = -3; y <= 3; y += 0.05) sup = std::max(sup, std::abs(rest_potential(g, {x + 1e-3, y + 1e-3})));
    CHECK(d.rearranged_abs <= sup * 1.05);
}
