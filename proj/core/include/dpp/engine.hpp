#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "dpp/beta.hpp"
#include "dpp/borrowing.hpp"
#include "dpp/posterior.hpp"
#include "dpp/random.hpp"

namespace dpp {

// One candidate hybrid design.
struct DesignSpec {
    int n_c;
    int n_t;
    BetaParams prior_c;
    BetaParams prior_t;
    HistoricalControl hist;
    BorrowingPolicy policy;
    double alpha;

    // Throws DomainError on sizes < 1, alpha outside (0, 1), or a policy whose
    // global weight is not n_ch_e / n_ch.
    void validate() const;
};

struct Scenario {
    double p_c;
    double p_t;
    double p_ch_observed;
};

struct ExactEnumeration {};
struct MonteCarlo {
    std::uint64_t n_sims = 100000;
    std::uint64_t seed = 20240101;
};
using EvaluationMethod = std::variant<ExactEnumeration, MonteCarlo>;

struct ExecutionOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct OCResult {
    Scenario scenario;
    double tau = 0.0;
    double reject_prob = 0.0;  // type I error when p_t == p_c, power otherwise
    double mean_pmd = 0.0;
    double sd_pmd = 0.0;
    double eps = 0.01;
    double xi_eps = 0.0;  // P(|d| > eps)
    double eess = 0.0;
    std::uint64_t n_sims = 0;  // 0 for exact enumeration
    double mc_se = 0.0;        // Monte Carlo standard error of reject_prob

    bool exact() const noexcept { return n_sims == 0; }
};

// y_c ~ Binomial(n_c, p_c), y_t ~ Binomial(n_t, p_t), drawn by inversion in
// that order from the stream.
TrialOutcome simulate_outcome(TrialStream& stream, const DesignSpec& design,
                              const Scenario& scenario);

// Everything that depends only on (y_c, y_t) for a design: realized weights,
// posterior mean differences and P(p_t > p_c | data) on the full
// (n_c + 1) x (n_t + 1) outcome grid. Scenarios only reweight this grid.
class OutcomeGrid {
public:
    explicit OutcomeGrid(DesignSpec design, ExecutionOptions options = {});

    const DesignSpec& design() const noexcept { return design_; }
    double post_prob(int y_c, int y_t) const noexcept {
        return post_prob_[static_cast<std::size_t>(y_c) * row_ + static_cast<std::size_t>(y_t)];
    }
    const WeightBreakdown& weight(int y_c) const noexcept {
        return weights_[static_cast<std::size_t>(y_c)];
    }
    double pmd(int y_c) const noexcept { return pmd_[static_cast<std::size_t>(y_c)]; }
    std::span<const double> post_probs() const noexcept { return post_prob_; }

private:
    DesignSpec design_;
    std::size_t row_;
    std::vector<WeightBreakdown> weights_;
    std::vector<double> pmd_;
    std::vector<double> post_prob_;
};

// Threshold tau controlling P(post_prob > tau) at p_c = p_t = p_null.
// Monte Carlo: order statistic ceil((1 - alpha) n) of the simulated
// posterior probabilities. Exact: the smallest attainable tau with
// P(post_prob > tau) <= alpha.
double calibrate_tau(const OutcomeGrid& grid, double p_null, const EvaluationMethod& method,
                     ExecutionOptions options = {});
double calibrate_tau(const DesignSpec& design, double p_null, const EvaluationMethod& method,
                     ExecutionOptions options = {});

OCResult operating_characteristics(const OutcomeGrid& grid, const Scenario& scenario, double tau,
                                   const EvaluationMethod& method, double eps = 0.01,
                                   ExecutionOptions options = {});
OCResult operating_characteristics(const DesignSpec& design, const Scenario& scenario, double tau,
                                   const EvaluationMethod& method, double eps = 0.01,
                                   ExecutionOptions options = {});

// One result per scenario against a single tau. Monte Carlo scenarios
// share the seed.
std::vector<OCResult> oc_sweep(const OutcomeGrid& grid, std::span<const Scenario> scenarios,
                               double tau, const EvaluationMethod& method, double eps = 0.01,
                               ExecutionOptions options = {});
std::vector<OCResult> oc_sweep(const DesignSpec& design, std::span<const Scenario> scenarios,
                               double tau, const EvaluationMethod& method, double eps = 0.01,
                               ExecutionOptions options = {});

}  // namespace dpp
