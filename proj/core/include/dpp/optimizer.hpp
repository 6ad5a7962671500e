#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dpp/engine.hpp"

namespace dpp {

struct OptimizationConstraints {
    double target_power = 0.8;
    double alpha = 0.1;
    double max_mean_pmd = std::numeric_limits<double>::infinity();  // d*
    double max_xi = 1.0;                                             // xi*
    double xi_eps = 0.01;
    double discrepancy_band = 0.1;
    double power_offset = 0.2;  // power evaluated at p_t = p_c + offset

    void validate() const;
};

struct CandidateSize {
    int n_c;
    int n_t;
    int n_ch_e;

    int total() const noexcept { return n_c + n_t; }
    friend bool operator==(const CandidateSize&, const CandidateSize&) = default;
};

// n_t = round(ratio * n_c), n_ch_e = round(m * n_c) for every n_c in
// [n_c_min, n_c_max] by step and every multiplier m, capped at n_ch.
// Sorted by total size, then n_ch_e, then n_c.
std::vector<CandidateSize> candidate_grid(int n_c_min, int n_c_max, int n_c_step, double ratio,
                                          std::span<const double> multipliers, int n_ch);

// Everything about the search that is not a candidate size.
struct SearchSetting {
    BetaParams prior_c{0.001, 0.001};
    BetaParams prior_t{0.001, 0.001};
    int y_ch = 0;
    int n_ch = 1;
    double p_hat_ch = 0.0;  // calibration point and centre of the band
    BorrowingMethod method = EmpiricalBayes{};
    double delta_max = kNoGate;
    EvaluationMethod evaluation = ExactEnumeration{};

    DesignSpec design(const CandidateSize& size, double alpha) const;
};

struct BandPoint {
    double p_c;
    OCResult null_oc;   // p_t = p_c
    OCResult power_oc;  // p_t = p_c + offset
};

struct DesignCandidate {
    CandidateSize size;
    std::string method;
    double tau = 0.0;
    std::vector<BandPoint> oc_at;  // p_hat_ch - band, p_hat_ch, p_hat_ch + band
    double power = 0.0;            // at p_c = p_hat_ch
    bool meets_power = false;
    bool meets_influence = false;

    bool feasible() const noexcept { return meets_power && meets_influence; }
};

struct OptimizationResult {
    bool feasible = false;
    // The selected design, or the best-power candidate when infeasible.
    DesignCandidate selected;
    std::vector<DesignCandidate> candidates;  // in grid order
};

DesignCandidate evaluate_candidate(const CandidateSize& size, const SearchSetting& setting,
                                   const OptimizationConstraints& constraints,
                                   ExecutionOptions options = {});

// Evaluates every grid element and returns the smallest feasible one.
// Throws DomainError on an empty grid or a candidate off the allocation ratio.
OptimizationResult min_sample_size(std::span<const CandidateSize> grid,
                                   const OptimizationConstraints& constraints, double ratio,
                                   const SearchSetting& setting, ExecutionOptions options = {});

struct SweepRow {
    CandidateSize size;
    double p_c;
    double tau;
    OCResult null_oc;
    OCResult power_oc;
};

// tau recalibrated per size at p_hat_ch; one row per (size, p_c).
std::vector<SweepRow> design_sweep(std::span<const CandidateSize> sizes,
                                   std::span<const double> p_c_values,
                                   const SearchSetting& setting,
                                   const OptimizationConstraints& constraints,
                                   ExecutionOptions options = {});

}  // namespace dpp
