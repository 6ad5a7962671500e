#include "dpp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "dpp/errors.hpp"
#include "parallel.hpp"

namespace dpp {
namespace {

constexpr std::uint64_t kChunk = 4096;

void require_rate(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie in [0, 1], got " << p;
        throw DomainError(msg.str());
    }
}

void validate_scenario(const Scenario& s) {
    require_rate(s.p_c, "p_c");
    require_rate(s.p_t, "p_t");
    require_rate(s.p_ch_observed, "p_ch_observed");
}

void validate_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        std::ostringstream msg;
        msg << "tau must lie in (0, 1), got " << tau;
        throw DomainError(msg.str());
    }
}

const MonteCarlo* monte_carlo(const EvaluationMethod& method) {
    const auto* mc = std::get_if<MonteCarlo>(&method);
    if (mc && mc->n_sims == 0) throw DomainError("n_sims must be at least 1");
    return mc;
}

// Per-chunk partial sums, reduced in chunk order.
struct Tally {
    std::uint64_t rejections = 0;
    std::uint64_t exceed = 0;
    double sum_d = 0.0;
    double sum_d2 = 0.0;
};

}  // namespace

void DesignSpec::validate() const {
    if (n_c < 1 || n_t < 1) {
        std::ostringstream msg;
        msg << "arm sizes must be at least 1 (n_c=" << n_c << ", n_t=" << n_t << ")";
        throw DomainError(msg.str());
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream msg;
        msg << "alpha must lie in (0, 1), got " << alpha;
        throw DomainError(msg.str());
    }
    if (std::abs(policy.global_a() - hist.global_weight()) > 1e-12) {
        std::ostringstream msg;
        msg << "global weight " << policy.global_a() << " does not match n_ch_e/n_ch = "
            << hist.global_weight();
        throw DomainError(msg.str());
    }
    validate_method(policy.method());
}

TrialOutcome simulate_outcome(TrialStream& stream, const DesignSpec& design,
                              const Scenario& scenario) {
    validate_scenario(scenario);
    const int y_c = BinomialSampler(design.n_c, scenario.p_c)(stream);
    const int y_t = BinomialSampler(design.n_t, scenario.p_t)(stream);
    return {y_c, design.n_c, y_t, design.n_t};
}

OutcomeGrid::OutcomeGrid(DesignSpec design, ExecutionOptions options)
    : design_(std::move(design)), row_(static_cast<std::size_t>(design_.n_t) + 1) {
    design_.validate();
    const auto rows = static_cast<std::size_t>(design_.n_c) + 1;
    weights_.resize(rows);
    pmd_.resize(rows);
    post_prob_.resize(rows * row_);

    std::vector<std::unique_ptr<SuperiorityIntegrator>> treatment(row_);
    for (std::size_t y_t = 0; y_t < row_; ++y_t) {
        const TrialOutcome probe(0, design_.n_c, static_cast<int>(y_t), design_.n_t);
        treatment[y_t] =
            std::make_unique<SuperiorityIntegrator>(treatment_posterior(probe, design_.prior_t));
    }

    detail::parallel_for(rows, options.threads, [&](std::size_t y_c) {
        const int yc = static_cast<int>(y_c);
        const TrialOutcome probe(yc, design_.n_c, 0, design_.n_t);
        weights_[y_c] =
            realized_weight(yc, design_.n_c, design_.hist, design_.prior_c, design_.policy);
        const double w = weights_[y_c].overall;
        pmd_[y_c] = dpp::pmd(probe, design_.hist, design_.prior_c, w);
        const BetaParams control = hybrid_posterior(probe, design_.hist, design_.prior_c, w);
        double* row = post_prob_.data() + y_c * row_;
        for (std::size_t y_t = 0; y_t < row_; ++y_t)
            row[y_t] = treatment[y_t]->probability_exceeds(control);
    });
}

double calibrate_tau(const OutcomeGrid& grid, double p_null, const EvaluationMethod& method,
                     ExecutionOptions options) {
    if (!(p_null > 0.0 && p_null < 1.0)) {
        std::ostringstream msg;
        msg << "calibration rate must lie in (0, 1), got " << p_null;
        throw DomainError(msg.str());
    }
    const DesignSpec& d = grid.design();

    if (const auto* mc = monte_carlo(method)) {
        const BinomialSampler draw_c(d.n_c, p_null), draw_t(d.n_t, p_null);
        std::vector<double> probs(mc->n_sims);
        const std::uint64_t chunks = (mc->n_sims + kChunk - 1) / kChunk;
        detail::parallel_for(chunks, options.threads, [&](std::size_t chunk) {
            const std::uint64_t end = std::min<std::uint64_t>(mc->n_sims, (chunk + 1) * kChunk);
            for (std::uint64_t i = chunk * kChunk; i < end; ++i) {
                TrialStream stream(mc->seed, i);
                const int y_c = draw_c(stream);
                const int y_t = draw_t(stream);
                probs[i] = grid.post_prob(y_c, y_t);
            }
        });
        const double n = static_cast<double>(mc->n_sims);
        auto k = static_cast<std::uint64_t>(std::ceil((1.0 - d.alpha) * n - 1e-9));
        k = std::clamp<std::uint64_t>(k, 1, mc->n_sims);
        std::nth_element(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         probs.end());
        return probs[k - 1];
    }

    const auto pmf_c = binomial_pmf_table(d.n_c, p_null);
    const auto pmf_t = binomial_pmf_table(d.n_t, p_null);
    std::vector<std::pair<double, double>> cells;  // (post_prob, mass)
    cells.reserve(pmf_c.size() * pmf_t.size());
    for (int y_c = 0; y_c <= d.n_c; ++y_c)
        for (int y_t = 0; y_t <= d.n_t; ++y_t)
            cells.emplace_back(grid.post_prob(y_c, y_t),
                               pmf_c[static_cast<std::size_t>(y_c)] *
                                   pmf_t[static_cast<std::size_t>(y_t)]);
    std::sort(cells.begin(), cells.end(),
              [](const auto& l, const auto& r) { return l.first > r.first; });

    // Walk distinct values from the top; mass_above is P(post_prob > v).
    double tau = cells.front().first;
    double mass_above = 0.0;
    std::size_t i = 0;
    while (i < cells.size()) {
        const double v = cells[i].first;
        if (mass_above > d.alpha) break;
        tau = v;
        while (i < cells.size() && cells[i].first == v) mass_above += cells[i++].second;
    }
    return tau;
}

double calibrate_tau(const DesignSpec& design, double p_null, const EvaluationMethod& method,
                     ExecutionOptions options) {
    return calibrate_tau(OutcomeGrid(design, options), p_null, method, options);
}

OCResult operating_characteristics(const OutcomeGrid& grid, const Scenario& scenario, double tau,
                                   const EvaluationMethod& method, double eps,
                                   ExecutionOptions options) {
    validate_scenario(scenario);
    validate_tau(tau);
    if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
    const DesignSpec& d = grid.design();

    OCResult out;
    out.scenario = scenario;
    out.tau = tau;
    out.eps = eps;
    out.eess = eess(d.n_c, scenario.p_c, d.hist, d.prior_c, d.policy);

    if (const auto* mc = monte_carlo(method)) {
        const BinomialSampler draw_c(d.n_c, scenario.p_c), draw_t(d.n_t, scenario.p_t);
        const std::uint64_t chunks = (mc->n_sims + kChunk - 1) / kChunk;
        std::vector<Tally> tallies(chunks);
        detail::parallel_for(chunks, options.threads, [&](std::size_t chunk) {
            Tally t;
            const std::uint64_t end = std::min<std::uint64_t>(mc->n_sims, (chunk + 1) * kChunk);
            for (std::uint64_t i = chunk * kChunk; i < end; ++i) {
                TrialStream stream(mc->seed, i);
                const int y_c = draw_c(stream);
                const int y_t = draw_t(stream);
                if (grid.post_prob(y_c, y_t) > tau) ++t.rejections;
                const double dd = grid.pmd(y_c);
                if (std::abs(dd) > eps) ++t.exceed;
                t.sum_d += dd;
                t.sum_d2 += dd * dd;
            }
            tallies[chunk] = t;
        });
        Tally total;
        for (const Tally& t : tallies) {
            total.rejections += t.rejections;
            total.exceed += t.exceed;
            total.sum_d += t.sum_d;
            total.sum_d2 += t.sum_d2;
        }
        const double n = static_cast<double>(mc->n_sims);
        out.n_sims = mc->n_sims;
        out.reject_prob = static_cast<double>(total.rejections) / n;
        out.xi_eps = static_cast<double>(total.exceed) / n;
        out.mean_pmd = total.sum_d / n;
        out.sd_pmd = std::sqrt(std::max(0.0, total.sum_d2 / n - out.mean_pmd * out.mean_pmd));
        out.mc_se = std::sqrt(out.reject_prob * (1.0 - out.reject_prob) / n);
        return out;
    }

    const auto pmf_c = binomial_pmf_table(d.n_c, scenario.p_c);
    const auto pmf_t = binomial_pmf_table(d.n_t, scenario.p_t);
    double reject = 0.0, mean = 0.0, exceed = 0.0;
    for (int y_c = 0; y_c <= d.n_c; ++y_c) {
        const double mc_mass = pmf_c[static_cast<std::size_t>(y_c)];
        if (mc_mass == 0.0) continue;
        double row = 0.0;
        for (int y_t = 0; y_t <= d.n_t; ++y_t)
            if (grid.post_prob(y_c, y_t) > tau) row += pmf_t[static_cast<std::size_t>(y_t)];
        reject += mc_mass * row;
        const double dd = grid.pmd(y_c);
        mean += mc_mass * dd;
        if (std::abs(dd) > eps) exceed += mc_mass;
    }
    double var = 0.0;
    for (int y_c = 0; y_c <= d.n_c; ++y_c) {
        const double dev = grid.pmd(y_c) - mean;
        var += pmf_c[static_cast<std::size_t>(y_c)] * dev * dev;
    }
    out.reject_prob = std::clamp(reject, 0.0, 1.0);
    out.xi_eps = std::clamp(exceed, 0.0, 1.0);
    out.mean_pmd = mean;
    out.sd_pmd = std::sqrt(var);
    return out;
}

OCResult operating_characteristics(const DesignSpec& design, const Scenario& scenario, double tau,
                                   const EvaluationMethod& method, double eps,
                                   ExecutionOptions options) {
    return operating_characteristics(OutcomeGrid(design, options), scenario, tau, method, eps,
                                     options);
}

std::vector<OCResult> oc_sweep(const OutcomeGrid& grid, std::span<const Scenario> scenarios,
                               double tau, const EvaluationMethod& method, double eps,
                               ExecutionOptions options) {
    if (scenarios.empty()) throw DomainError("scenario list is empty");
    std::vector<OCResult> out;
    out.reserve(scenarios.size());
    for (const Scenario& s : scenarios)
        out.push_back(operating_characteristics(grid, s, tau, method, eps, options));
    return out;
}

std::vector<OCResult> oc_sweep(const DesignSpec& design, std::span<const Scenario> scenarios,
                               double tau, const EvaluationMethod& method, double eps,
                               ExecutionOptions options) {
    return oc_sweep(OutcomeGrid(design, options), scenarios, tau, method, eps, options);
}

}  // namespace dpp
