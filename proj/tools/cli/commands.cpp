#include "cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <dpp/errors.hpp>
#include <dpp/version.hpp>

namespace dpp::cli {
namespace {

std::string prob(double p) { return fmt::format("{:.6f}", p); }

std::string mode_name(const OCResult& r) { return r.exact() ? "exact" : "mc"; }
std::string sims(const OCResult& r) { return r.exact() ? "exact" : fmt::format("{}", r.n_sims); }

std::string delta(double d) { return std::isinf(d) ? "inf" : fmt::format("{}", d); }

std::string oc_columns(const OCResult& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", prob(r.scenario.p_c),
                       prob(r.scenario.p_t), prob(r.tau), prob(r.reject_prob), prob(r.mean_pmd),
                       prob(r.sd_pmd), prob(r.xi_eps), fmt::format("{:.2f}", r.eess),
                       mode_name(r), sims(r), prob(r.mc_se));
}

constexpr const char* kOcColumns =
    "p_c,p_t,tau,reject_prob,mean_pmd,sd_pmd,xi_eps,eess,mode,n_sims,mc_se";

ExecutionOptions exec(const RunConfig& c) { return {c.threads}; }

}  // namespace

std::string header(const Invocation& inv) {
    std::string out = fmt::format("# dpp {}\n# command: {}\n# seed: {}\n# config_hash: {}\n",
                                  kVersion, inv.command, inv.config.seed,
                                  config_hash(inv.config));
    std::istringstream lines(emit_config(inv.config));
    for (std::string line; std::getline(lines, line);)
        out += line.empty() ? "#\n" : "# " + line + "\n";
    return out;
}

int run_weights(const Invocation& inv, std::ostream& out) {
    const RunConfig& c = inv.config;
    if (!c.n_c) throw ConfigError("[design] n_c is required");
    const int n_c = *c.n_c;
    if (n_c < 1) throw ConfigError(fmt::format("[design] n_c must be at least 1, got {}", n_c));
    const HistoricalControl hist = history(c);
    const BorrowingPolicy policy = borrowing_policy(c, hist);

    std::vector<int> ys = c.y_c;
    for (double p : c.p_hat_c) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(fmt::format("[weights] p_hat_c must lie in [0, 1], got {}", p));
        ys.push_back(static_cast<int>(std::lround(p * n_c)));
    }
    for (int y : ys)
        if (y < 0 || y > n_c)
            throw ConfigError(fmt::format("[weights] y_c must lie in [0, {}], got {}", n_c, y));
    std::vector<BetaParams> priors;
    for (const Shape& s : c.priors.empty() ? std::vector<Shape>{c.prior_c} : c.priors) {
        try {
            priors.emplace_back(s.first, s.second);
        } catch (const DomainError& e) {
            throw ConfigError(fmt::format("[weights] {}", e.what()));
        }
    }

    fmt::print(out, "{}", header(inv));
    fmt::print(out, "method,prior_alpha,prior_beta,n_c,y_c,p_hat_c,w_d,gate,w\n");
    const std::string tag = method_tag(policy.method());
    for (const BetaParams& prior : priors) {
        for (int y : ys) {
            const double w_d = dynamic_weight(y, n_c, hist, prior, policy);
            const WeightBreakdown w = realized_weight(y, n_c, hist, prior, policy);
            fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", tag, prior.alpha(), prior.beta(), n_c,
                       y, prob(static_cast<double>(y) / n_c), prob(w_d), w.gate ? 1 : 0,
                       prob(w.overall));
        }
    }
    return 0;
}

int run_calibrate(const Invocation& inv, std::ostream& out, std::ostream& report) {
    const RunConfig& c = inv.config;
    const DesignSpec design = design_spec(c);
    const double p_null = null_rate(c);
    const EvaluationMethod method = evaluation(c);
    const double tau = calibrate_tau(design, p_null, method, exec(c));

    const std::string n = c.mode == "exact" ? "exact" : fmt::format("{}", c.n_sims);
    fmt::print(report, "tau={} mode={} n_sims={} seed={} p_null={}\n", prob(tau), c.mode, n,
               c.seed, p_null);
    fmt::print(out, "{}", header(inv));
    fmt::print(out, "tau={:.17g}\nmode={}\nn_sims={}\nseed={}\np_null={}\nalpha={}\ndesign_hash={}\n",
               tau, c.mode, n, c.seed, p_null, c.alpha, design_hash(c));
    return 0;
}

CalibrationRecord read_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open calibration record '{}'", path));
    std::map<std::string, std::string> kv;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("calibration record '{}': bad line '{}'", path, line));
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (!kv.count("tau") || !kv.count("design_hash"))
        throw ConfigError(fmt::format("calibration record '{}' lacks tau or design_hash", path));
    RunConfig scratch;
    set_field(scratch, "simulation", "tau", kv["tau"]);
    return {*scratch.tau, kv["design_hash"]};
}

int run_oc(const Invocation& inv, std::ostream& out) {
    RunConfig c = inv.config;
    const DesignSpec design = design_spec(c);
    double tau;
    if (c.tau) {
        tau = *c.tau;
    } else if (inv.calibration_path) {
        const CalibrationRecord rec = read_calibration(*inv.calibration_path);
        if (rec.design_hash != design_hash(c))
            throw ConfigError(fmt::format(
                "calibration record '{}' was made for a different design (hash {} vs {})",
                *inv.calibration_path, rec.design_hash, design_hash(c)));
        tau = rec.tau;
    } else {
        throw ConfigError(
            "no tau: run 'dpp calibrate --out <file>' and pass --calibration <file>, or give --tau");
    }
    if (!(tau > 0.0 && tau < 1.0))
        throw ConfigError(fmt::format("tau must lie in (0, 1), got {}", tau));
    const auto list = scenarios(c);
    if (list.empty()) throw ConfigError("[scenarios] p_c is empty");

    const OutcomeGrid grid(design, exec(c));
    const auto results = oc_sweep(grid, list, tau, evaluation(c), c.eps, exec(c));

    Invocation shown = inv;
    shown.config.tau = tau;
    fmt::print(out, "{}", header(shown));
    fmt::print(out, "method,delta_max,n_ch_e,{}\n", kOcColumns);
    const std::string tag = method_tag(design.policy.method());
    for (const OCResult& r : results)
        fmt::print(out, "{},{},{},{}\n", tag, delta(c.delta_max), design.hist.max_borrowed(),
                   oc_columns(r));
    return 0;
}

int run_optimize(const Invocation& inv, std::ostream& out, std::ostream& report) {
    const RunConfig& c = inv.config;
    const SearchSetting setting = search_setting(c);
    const OptimizationConstraints k = constraints(c);
    std::vector<CandidateSize> grid;
    try {
        grid = candidate_grid(c.n_c_min, c.n_c_max, c.n_c_step, c.ratio, c.multipliers,
                              setting.n_ch);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[optimize] {}", e.what()));
    }
    if (grid.empty()) throw ConfigError("[optimize] candidate grid is empty");
    const OptimizationResult result = min_sample_size(grid, k, c.ratio, setting, exec(c));

    const DesignCandidate& s = result.selected;
    fmt::print(report, "{}\n", result.feasible ? "FEASIBLE" : "INFEASIBLE");
    fmt::print(report, "{}: n_t={} n_c={} n_ch_e={} method={} tau={} power={} candidates={}\n",
               result.feasible ? "selected" : "best-power candidate", s.size.n_t, s.size.n_c,
               s.size.n_ch_e, s.method, prob(s.tau), prob(s.power), result.candidates.size());
    for (const BandPoint& bp : s.oc_at)
        fmt::print(report, "  p_c={} type_i={} power={} mean_pmd={} xi_eps={} eess={:.2f}\n",
                   prob(bp.p_c), prob(bp.null_oc.reject_prob), prob(bp.power_oc.reject_prob),
                   prob(bp.null_oc.mean_pmd), prob(bp.null_oc.xi_eps), bp.null_oc.eess);

    fmt::print(out, "{}", header(inv));
    fmt::print(out, "# status: {}\n", result.feasible ? "FEASIBLE" : "INFEASIBLE");
    fmt::print(out, "n_t,n_c,n_ch_e,method,delta_max,{},meets_power,meets_influence,selected\n",
               kOcColumns);
    for (const DesignCandidate& d : result.candidates) {
        const bool chosen = d.size == s.size;
        for (const BandPoint& bp : d.oc_at)
            for (const OCResult* r : {&bp.null_oc, &bp.power_oc})
                fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", d.size.n_t, d.size.n_c,
                           d.size.n_ch_e, d.method, delta(c.delta_max), oc_columns(*r),
                           d.meets_power ? 1 : 0, d.meets_influence ? 1 : 0, chosen ? 1 : 0);
    }
    return 0;
}

int run_eess(const Invocation& inv, std::ostream& out) {
    const RunConfig& c = inv.config;
    if (!c.n_c) throw ConfigError("[design] n_c is required");
    if (*c.n_c < 1) throw ConfigError("[design] n_c must be at least 1");
    const HistoricalControl hist = history(c);
    const BorrowingPolicy policy = borrowing_policy(c, hist);
    BetaParams prior(0.5, 0.5);
    try {
        prior = BetaParams(c.prior_c.first, c.prior_c.second);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[design] {}", e.what()));
    }
    std::vector<double> rates = c.p_c;
    if (rates.empty()) rates.push_back(historical_rate(c));

    fmt::print(out, "{}", header(inv));
    fmt::print(out, "method,delta_max,n_c,n_ch,n_ch_e,p_c,eess,eess_alt\n");
    for (double p : rates) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(fmt::format("[scenarios] p_c must lie in [0, 1], got {}", p));
        fmt::print(out, "{},{},{},{},{},{},{:.2f},{:.2f}\n", method_tag(policy.method()),
                   delta(c.delta_max), *c.n_c, hist.size(), hist.max_borrowed(), prob(p),
                   eess(*c.n_c, p, hist, prior, policy), eess_literal(*c.n_c, p, hist, prior, policy));
    }
    return 0;
}

int run_sweep(const Invocation& inv, std::ostream& out) {
    const RunConfig& c = inv.config;
    const SearchSetting setting = search_setting(c);
    const OptimizationConstraints k = constraints(c);
    std::vector<CandidateSize> sizes;
    try {
        sizes = candidate_grid(c.n_c_min, c.n_c_max, c.n_c_step, c.ratio, c.multipliers,
                               setting.n_ch);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[optimize] {}", e.what()));
    }
    std::vector<double> rates = c.p_c;
    if (rates.empty()) rates.push_back(setting.p_hat_ch);
    for (double p : rates)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(fmt::format("[scenarios] p_c must lie in [0, 1], got {}", p));

    const auto rows = design_sweep(sizes, rates, setting, k, exec(c));
    fmt::print(out, "{}", header(inv));
    fmt::print(out, "n_t,n_c,n_ch_e,method,p_c,tau,type_i,power,mean_pmd,xi_eps,eess\n");
    const std::string tag = method_tag(setting.method);
    for (const SweepRow& r : rows)
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{:.2f}\n", r.size.n_t, r.size.n_c,
                   r.size.n_ch_e, tag, prob(r.p_c), prob(r.tau), prob(r.null_oc.reject_prob),
                   prob(r.power_oc.reject_prob), prob(r.null_oc.mean_pmd),
                   prob(r.null_oc.xi_eps), r.null_oc.eess);
    return 0;
}

}  // namespace dpp::cli
