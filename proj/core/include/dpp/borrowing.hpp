#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dpp/beta.hpp"

namespace dpp {

// Historical control arm: y_ch responders out of n_ch subjects, of which at
// most n_ch_e equivalent subjects may be borrowed.
class HistoricalControl {
public:
    HistoricalControl(int y_ch, int n_ch, int n_ch_e);

    // Historical responders taken as the nearest integer to rate * n_ch.
    static HistoricalControl from_rate(double rate, int n_ch, int n_ch_e);

    int responders() const noexcept { return y_ch_; }
    int size() const noexcept { return n_ch_; }
    int max_borrowed() const noexcept { return n_ch_e_; }
    int non_responders() const noexcept { return n_ch_ - y_ch_; }
    double rate() const noexcept { return static_cast<double>(y_ch_) / n_ch_; }

    // a = n_ch_e / n_ch
    double global_weight() const noexcept { return static_cast<double>(n_ch_e_) / n_ch_; }

    HistoricalControl with_max_borrowed(int n_ch_e) const { return {y_ch_, n_ch_, n_ch_e}; }

    friend bool operator==(const HistoricalControl&, const HistoricalControl&) = default;

private:
    int y_ch_;
    int n_ch_;
    int n_ch_e_;
};

struct EmpiricalBayes {
    friend bool operator==(const EmpiricalBayes&, const EmpiricalBayes&) = default;
};
struct BayesianP {
    double eta = 1.0;
    friend bool operator==(const BayesianP&, const BayesianP&) = default;
};
struct GeneralizedBC {
    double theta = 0.5;
    double eta = 1.0;
    friend bool operator==(const GeneralizedBC&, const GeneralizedBC&) = default;
};
struct JensenShannon {
    double eta = 2.0;
    friend bool operator==(const JensenShannon&, const JensenShannon&) = default;
};
// w_d fixed at 1: the plain power prior.
struct FixedWeight {
    friend bool operator==(const FixedWeight&, const FixedWeight&) = default;
};

using BorrowingMethod =
    std::variant<EmpiricalBayes, BayesianP, GeneralizedBC, JensenShannon, FixedWeight>;

// Short tag: "eb", "bp", "gbc", "jsd" or "fixed".
std::string method_tag(const BorrowingMethod& method);

// Validates tuning parameters; throws DomainError.
void validate_method(const BorrowingMethod& method);

inline constexpr double kNoGate = std::numeric_limits<double>::infinity();

// Dynamic method, gate threshold and global weight a in w = a * w_d * 1{gate}.
class BorrowingPolicy {
public:
    BorrowingPolicy(BorrowingMethod method, double delta_max, double global_a);

    static BorrowingPolicy for_history(BorrowingMethod method, double delta_max,
                                       const HistoricalControl& hist) {
        return {std::move(method), delta_max, hist.global_weight()};
    }

    const BorrowingMethod& method() const noexcept { return method_; }
    double delta_max() const noexcept { return delta_max_; }
    double global_a() const noexcept { return global_a_; }

    friend bool operator==(const BorrowingPolicy&, const BorrowingPolicy&) = default;

private:
    BorrowingMethod method_;
    double delta_max_;
    double global_a_;
};

// Empirical Bayes: maximizes the beta-binomial marginal likelihood of y_c
// under the power prior Beta(a0 + w y_ch, b0 + w (n_ch - y_ch)) over w in [0, 1].
double weight_eb(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior);

// Log marginal likelihood ratio maximized by weight_eb, up to a constant.
double eb_objective(double w, int y_c, int n_c, const HistoricalControl& hist,
                    const BetaParams& prior);

// The concurrent and a-scaled historical posteriors compared by the
// Bayesian P, generalized Bhattacharyya and Jensen-Shannon methods.
struct ComparedPosteriors {
    BetaParams concurrent;
    BetaParams historical;
};
ComparedPosteriors compared_posteriors(int y_c, int n_c, const HistoricalControl& hist,
                                       const BetaParams& prior, double global_a);

double weight_bp(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                 double eta, double global_a);
double weight_gbc(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                  double theta, double eta, double global_a);
double weight_jsd(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                  double eta, double global_a);

// Similarity measures on an arbitrary pair of beta densities.
double bayesian_p_similarity(const BetaParams& f_c, const BetaParams& f_ch, double eta);
double generalized_bc(const BetaParams& f_c, const BetaParams& f_ch, double theta, double eta);
// 1 - JSD with base-2 logarithms, in [0, 1].
double jsd_similarity(const BetaParams& f_c, const BetaParams& f_ch);

// w_d for the policy's method.
double dynamic_weight(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                      const BorrowingPolicy& policy);

// w_d for every y_c in 0..n_c.
std::vector<double> dynamic_weights(int n_c, const HistoricalControl& hist,
                                    const BetaParams& prior, const BorrowingPolicy& policy);

bool gate_open(double p_hat_c, double p_hat_ch, double delta_max) noexcept;
bool gate_open(int y_c, int n_c, const HistoricalControl& hist, double delta_max) noexcept;

// w = a * w_d * 1{|p_hat_c - p_hat_ch| < delta_max}
double overall_weight(double w_d, const BorrowingPolicy& policy, double p_hat_c,
                      double p_hat_ch) noexcept;

double binomial_pmf(int k, int n, double p);
std::vector<double> binomial_pmf_table(int n, double p);

// Expected effective sample size n_ch * E[w] = n_ch_e * E[w_d 1{gate}] over
// y_c ~ Binomial(n_c, p_c).
double eess(int n_c, double p_c, const HistoricalControl& hist, const BetaParams& prior,
            const BorrowingPolicy& policy);

// The literal n_ch_e * E[w] reading, reported for diagnosis only.
double eess_literal(int n_c, double p_c, const HistoricalControl& hist,
                    const BetaParams& prior, const BorrowingPolicy& policy);

}  // namespace dpp
