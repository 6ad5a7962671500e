#include "dpp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpp/errors.hpp"
#include "parallel.hpp"

namespace dpp {
namespace {

void require(bool ok, const char* what, double value) {
    if (!ok) {
        std::ostringstream msg;
        msg << what << ", got " << value;
        throw DomainError(msg.str());
    }
}

double clip_rate(double p) { return std::clamp(p, 0.0, 1.0); }

bool size_order(const CandidateSize& l, const CandidateSize& r) {
    if (l.total() != r.total()) return l.total() < r.total();
    if (l.n_ch_e != r.n_ch_e) return l.n_ch_e < r.n_ch_e;
    return l.n_c < r.n_c;
}

}  // namespace

void OptimizationConstraints::validate() const {
    require(target_power >= 0.0 && target_power < 1.0, "target power must lie in [0, 1)",
            target_power);
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)", alpha);
    require(max_mean_pmd >= 0.0, "max_mean_pmd must be nonnegative", max_mean_pmd);
    require(max_xi >= 0.0 && max_xi <= 1.0, "max_xi must lie in [0, 1]", max_xi);
    require(xi_eps >= 0.0 && xi_eps <= 1.0, "xi_eps must lie in [0, 1]", xi_eps);
    require(discrepancy_band >= 0.0 && discrepancy_band < 1.0,
            "discrepancy band must lie in [0, 1)", discrepancy_band);
    require(power_offset > 0.0 && power_offset < 1.0, "power offset must lie in (0, 1)",
            power_offset);
}

std::vector<CandidateSize> candidate_grid(int n_c_min, int n_c_max, int n_c_step, double ratio,
                                          std::span<const double> multipliers, int n_ch) {
    require(n_c_min >= 1, "n_c_min must be at least 1", n_c_min);
    require(n_c_max >= n_c_min, "n_c_max must not be below n_c_min", n_c_max);
    require(n_c_step >= 1, "n_c step must be at least 1", n_c_step);
    require(ratio > 0.0 && std::isfinite(ratio), "allocation ratio must be positive", ratio);
    require(!multipliers.empty(), "at least one multiplier is required", 0.0);
    std::vector<CandidateSize> out;
    for (int n_c = n_c_min; n_c <= n_c_max; n_c += n_c_step) {
        const int n_t = static_cast<int>(std::lround(ratio * n_c));
        if (n_t < 1) continue;
        for (double m : multipliers) {
            require(m >= 0.0 && std::isfinite(m), "multiplier must be nonnegative", m);
            const int n_ch_e = std::min(n_ch, static_cast<int>(std::lround(m * n_c)));
            const CandidateSize size{n_c, n_t, n_ch_e};
            if (std::find(out.begin(), out.end(), size) == out.end()) out.push_back(size);
        }
    }
    std::sort(out.begin(), out.end(), size_order);
    return out;
}

DesignSpec SearchSetting::design(const CandidateSize& size, double alpha) const {
    const HistoricalControl hist(y_ch, n_ch, size.n_ch_e);
    DesignSpec d{size.n_c, size.n_t, prior_c, prior_t, hist,
                 BorrowingPolicy::for_history(method, delta_max, hist), alpha};
    d.validate();
    return d;
}

DesignCandidate evaluate_candidate(const CandidateSize& size, const SearchSetting& setting,
                                   const OptimizationConstraints& constraints,
                                   ExecutionOptions options) {
    constraints.validate();
    const OutcomeGrid grid(setting.design(size, constraints.alpha), options);

    DesignCandidate c;
    c.size = size;
    c.method = method_tag(setting.method);
    c.tau = calibrate_tau(grid, setting.p_hat_ch, setting.evaluation, options);

    const double centre = setting.p_hat_ch;
    const double band = constraints.discrepancy_band;
    std::vector<double> points{clip_rate(centre - band), centre, clip_rate(centre + band)};
    points.erase(std::unique(points.begin(), points.end()), points.end());

    c.meets_influence = true;
    for (double p_c : points) {
        const Scenario null_s{p_c, p_c, setting.p_hat_ch};
        const Scenario alt_s{p_c, clip_rate(p_c + constraints.power_offset), setting.p_hat_ch};
        BandPoint bp{p_c,
                     operating_characteristics(grid, null_s, c.tau, setting.evaluation,
                                               constraints.xi_eps, options),
                     operating_characteristics(grid, alt_s, c.tau, setting.evaluation,
                                               constraints.xi_eps, options)};
        if (std::abs(bp.null_oc.mean_pmd) > constraints.max_mean_pmd ||
            bp.null_oc.xi_eps > constraints.max_xi)
            c.meets_influence = false;
        if (p_c == centre) c.power = bp.power_oc.reject_prob;
        c.oc_at.push_back(std::move(bp));
    }
    c.meets_power = c.power >= constraints.target_power;
    return c;
}

OptimizationResult min_sample_size(std::span<const CandidateSize> grid,
                                   const OptimizationConstraints& constraints, double ratio,
                                   const SearchSetting& setting, ExecutionOptions options) {
    if (grid.empty()) throw DomainError("candidate grid is empty");
    constraints.validate();
    for (const CandidateSize& s : grid) {
        if (std::lround(ratio * s.n_c) != s.n_t) {
            std::ostringstream msg;
            msg << "candidate (n_t=" << s.n_t << ", n_c=" << s.n_c
                << ") is off the allocation ratio " << ratio;
            throw DomainError(msg.str());
        }
    }

    OptimizationResult out;
    out.candidates.resize(grid.size());
    // One grid per worker; grid construction itself runs single-threaded.
    detail::parallel_for(grid.size(), options.threads, [&](std::size_t i) {
        out.candidates[i] = evaluate_candidate(grid[i], setting, constraints, {1});
    });

    const DesignCandidate* best = nullptr;
    for (const DesignCandidate& c : out.candidates)
        if (c.feasible() && (!best || size_order(c.size, best->size))) best = &c;
    if (best) {
        out.feasible = true;
        out.selected = *best;
        return out;
    }
    best = &out.candidates.front();
    for (const DesignCandidate& c : out.candidates)
        if (c.power > best->power) best = &c;
    out.selected = *best;
    return out;
}

std::vector<SweepRow> design_sweep(std::span<const CandidateSize> sizes,
                                   std::span<const double> p_c_values,
                                   const SearchSetting& setting,
                                   const OptimizationConstraints& constraints,
                                   ExecutionOptions options) {
    constraints.validate();
    if (sizes.empty() || p_c_values.empty()) return {};
    std::vector<std::vector<SweepRow>> blocks(sizes.size());
    detail::parallel_for(sizes.size(), options.threads, [&](std::size_t i) {
        const OutcomeGrid grid(setting.design(sizes[i], constraints.alpha), {1});
        const double tau = calibrate_tau(grid, setting.p_hat_ch, setting.evaluation, {1});
        for (double p_c : p_c_values) {
            const Scenario null_s{p_c, p_c, setting.p_hat_ch};
            const Scenario alt_s{p_c, clip_rate(p_c + constraints.power_offset),
                                 setting.p_hat_ch};
            blocks[i].push_back(
                {sizes[i], p_c, tau,
                 operating_characteristics(grid, null_s, tau, setting.evaluation,
                                           constraints.xi_eps, {1}),
                 operating_characteristics(grid, alt_s, tau, setting.evaluation,
                                           constraints.xi_eps, {1})});
        }
    });
    std::vector<SweepRow> rows;
    for (auto& b : blocks) rows.insert(rows.end(), b.begin(), b.end());
    return rows;
}

}  // namespace dpp
