#include "gapedge/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gapedge/errors.hpp"

namespace gapedge::mathieu {

std::size_t Problem::min_modes(double p) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * std::abs(p)))) + kModeMargin;
}

Problem Problem::with_default_modes(double p) {
    if (!std::isfinite(p)) throw InvalidInput("mathieu: coupling must be finite");
    return {std::abs(p), min_modes(p)};
}

void Problem::validate() const {
    if (!std::isfinite(p) || p < 0.0) throw InvalidInput("mathieu: p must be finite and >= 0");
    if (n_modes < min_modes(p))
        throw InvalidInput("mathieu: n_modes below ceil(sqrt(2p)) + " +
                           std::to_string(kModeMargin));
}

linalg::SymTridiag assemble(const Problem& problem) {
    problem.validate();
    const auto big_k = static_cast<long>(problem.n_modes);
    linalg::SymTridiag t;
    t.diag.reserve(2 * problem.n_modes + 1);
    for (long k = -big_k; k <= big_k; ++k) t.diag.push_back(static_cast<double>(k * k));
    t.offdiag.assign(2 * problem.n_modes, -0.5 * problem.p);
    return t;
}

namespace {

std::vector<double> solve_truncated(const Problem& pr, std::size_t& wanted) {
    const auto t = assemble(pr);
    const std::size_t negatives = linalg::sturm_count(t, 0.0);
    wanted = std::min(t.size(), negatives + kExtraPositive);
    return linalg::eigen_tridiag(t, wanted);
}

}  // namespace

Spectrum spectrum(const Problem& problem) {
    problem.validate();
    Problem cur = problem;
    std::size_t wanted = 0;
    auto ev = solve_truncated(cur, wanted);
    for (int round = 0; round < kMaxDoublings; ++round) {
        Problem next{cur.p, 2 * cur.n_modes};
        std::size_t next_wanted = 0;
        auto next_ev = solve_truncated(next, next_wanted);
        const std::size_t tracked = std::min({kTrackedEigenvalues, ev.size(), next_ev.size()});
        double shift = 0.0;
        for (std::size_t i = 0; i < tracked; ++i)
            shift = std::max(shift, std::abs(ev[i] - next_ev[i]));
        cur = next;
        ev = std::move(next_ev);
        if (shift < kConvergenceTol) {
            double acc = 0.0;
            for (double lam : ev)
                if (lam < 0.0) acc += std::sqrt(-lam);
            return {cur, ev, acc / std::numbers::pi};
        }
    }
    throw TruncationError("mathieu: eigenvalues did not settle after " +
                          std::to_string(kMaxDoublings) + " doublings");
}

double rate(double p) {
    if (!std::isfinite(p)) throw InvalidInput("mathieu: coupling must be finite");
    if (p == 0.0) return 0.0;
    return spectrum(Problem::with_default_modes(p)).rate;
}

std::vector<double> lowest(double p, std::size_t k) {
    if (k == 0) throw InvalidInput("mathieu: need k >= 1");
    auto prob = Problem::with_default_modes(p);
    // Make sure the truncation is large enough to hold k modes.
    while (2 * prob.n_modes + 1 < 2 * k) prob.n_modes *= 2;
    auto sp = spectrum(prob);
    if (sp.eigenvalues.size() < k) {
        const auto t = assemble(sp.problem);
        return linalg::eigen_tridiag(t, k);
    }
    sp.eigenvalues.resize(k);
    return sp.eigenvalues;
}

}  // namespace gapedge::mathieu
