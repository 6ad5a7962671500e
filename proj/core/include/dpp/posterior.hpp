#pragma once

#include "dpp/beta.hpp"
#include "dpp/borrowing.hpp"

namespace dpp {

// Responders and sizes of the concurrent control and treatment arms.
class TrialOutcome {
public:
    TrialOutcome(int y_c, int n_c, int y_t, int n_t);

    int y_c() const noexcept { return y_c_; }
    int n_c() const noexcept { return n_c_; }
    int y_t() const noexcept { return y_t_; }
    int n_t() const noexcept { return n_t_; }
    double control_rate() const noexcept { return static_cast<double>(y_c_) / n_c_; }

    friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;

private:
    int y_c_, n_c_, y_t_, n_t_;
};

struct PosteriorPair {
    BetaParams control;    // hybrid
    BetaParams treatment;
    double weight_used;
};

// The three factors of the realized weight w = a * w_d * 1{gate}.
// `dynamic` stays 0 when the gate is closed.
struct WeightBreakdown {
    double dynamic = 0.0;
    bool gate = false;
    double overall = 0.0;
};

WeightBreakdown realized_weight(int y_c, int n_c, const HistoricalControl& hist,
                                const BetaParams& prior_c, const BorrowingPolicy& policy);

// Beta(a0c + y_c + w y_ch, b0c + (n_c - y_c) + w (n_ch - y_ch))
BetaParams hybrid_posterior(const TrialOutcome& outcome, const HistoricalControl& hist,
                            const BetaParams& prior_c, double w);

BetaParams treatment_posterior(const TrialOutcome& outcome, const BetaParams& prior_t);

// Posterior mean of p_c with the historical arm discounted by a.
double posterior_mean_hybrid(const TrialOutcome& outcome, const HistoricalControl& hist,
                             const BetaParams& prior_c, double a);

// Posterior mean of p_c ignoring the historical control.
double posterior_mean_concurrent(const TrialOutcome& outcome, const BetaParams& prior_c);

// d = mu - mu~ at the realized weight.
double pmd(const TrialOutcome& outcome, const HistoricalControl& hist, const BetaParams& prior_c,
           double w_effective);

PosteriorPair build_posteriors(const TrialOutcome& outcome, const HistoricalControl& hist,
                               const BetaParams& prior_c, const BetaParams& prior_t,
                               const BorrowingPolicy& policy);

struct Decision {
    bool significant;
    double post_prob;  // P(p_t > p_c | hybrid data)
    double weight_used;
};

// Significant iff P(p_t > p_c | data) > tau, strictly.
Decision decide(const TrialOutcome& outcome, const HistoricalControl& hist,
                const BetaParams& prior_c, const BetaParams& prior_t,
                const BorrowingPolicy& policy, double tau);

}  // namespace dpp
