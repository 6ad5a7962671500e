#include "dpp/posterior.hpp"

#include <sstream>

#include "dpp/errors.hpp"

namespace dpp {
namespace {

void require_weight(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        std::ostringstream msg;
        msg << "borrowing weight must lie in [0, 1], got " << w;
        throw DomainError(msg.str());
    }
}

}  // namespace

TrialOutcome::TrialOutcome(int y_c, int n_c, int y_t, int n_t)
    : y_c_(y_c), n_c_(n_c), y_t_(y_t), n_t_(n_t) {
    if (n_c < 1 || n_t < 1 || y_c < 0 || y_c > n_c || y_t < 0 || y_t > n_t) {
        std::ostringstream msg;
        msg << "invalid trial outcome (y_c=" << y_c << ", n_c=" << n_c << ", y_t=" << y_t
            << ", n_t=" << n_t << ")";
        throw DomainError(msg.str());
    }
}

WeightBreakdown realized_weight(int y_c, int n_c, const HistoricalControl& hist,
                                const BetaParams& prior_c, const BorrowingPolicy& policy) {
    WeightBreakdown out;
    out.gate = gate_open(y_c, n_c, hist, policy.delta_max());
    if (!out.gate) return out;  // w_d is not evaluated behind a closed gate
    out.dynamic = dynamic_weight(y_c, n_c, hist, prior_c, policy);
    out.overall = overall_weight(out.dynamic, policy, static_cast<double>(y_c) / n_c, hist.rate());
    return out;
}

BetaParams hybrid_posterior(const TrialOutcome& outcome, const HistoricalControl& hist,
                            const BetaParams& prior_c, double w) {
    require_weight(w);
    return {prior_c.alpha() + outcome.y_c() + w * hist.responders(),
            prior_c.beta() + (outcome.n_c() - outcome.y_c()) + w * hist.non_responders()};
}

BetaParams treatment_posterior(const TrialOutcome& outcome, const BetaParams& prior_t) {
    return {prior_t.alpha() + outcome.y_t(), prior_t.beta() + (outcome.n_t() - outcome.y_t())};
}

double posterior_mean_hybrid(const TrialOutcome& outcome, const HistoricalControl& hist,
                             const BetaParams& prior_c, double a) {
    require_weight(a);
    return (prior_c.alpha() + outcome.y_c() + a * hist.responders()) /
           (prior_c.alpha() + prior_c.beta() + outcome.n_c() + a * hist.size());
}

double posterior_mean_concurrent(const TrialOutcome& outcome, const BetaParams& prior_c) {
    return (prior_c.alpha() + outcome.y_c()) /
           (prior_c.alpha() + prior_c.beta() + outcome.n_c());
}

double pmd(const TrialOutcome& outcome, const HistoricalControl& hist, const BetaParams& prior_c,
           double w_effective) {
    require_weight(w_effective);
    if (w_effective == 0.0) return 0.0;
    return posterior_mean_hybrid(outcome, hist, prior_c, w_effective) -
           posterior_mean_concurrent(outcome, prior_c);
}

PosteriorPair build_posteriors(const TrialOutcome& outcome, const HistoricalControl& hist,
                               const BetaParams& prior_c, const BetaParams& prior_t,
                               const BorrowingPolicy& policy) {
    const auto w = realized_weight(outcome.y_c(), outcome.n_c(), hist, prior_c, policy);
    return {hybrid_posterior(outcome, hist, prior_c, w.overall),
            treatment_posterior(outcome, prior_t), w.overall};
}

Decision decide(const TrialOutcome& outcome, const HistoricalControl& hist,
                const BetaParams& prior_c, const BetaParams& prior_t,
                const BorrowingPolicy& policy, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        std::ostringstream msg;
        msg << "decision threshold tau must lie in (0, 1), got " << tau;
        throw DomainError(msg.str());
    }
    const PosteriorPair post = build_posteriors(outcome, hist, prior_c, prior_t, policy);
    const double prob = prob_superiority(post.treatment, post.control);
    return {prob > tau, prob, post.weight_used};
}

}  // namespace dpp
