// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <dpp/beta.hpp>
#include <dpp/borrowing.hpp>
#include <dpp/engine.hpp>
#include <dpp/optimizer.hpp>
#include <dpp/posterior.hpp>

#include "support/oracles.hpp"

using namespace dpp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok = true;
    std::string detail;

    void near(const char* what, double got, double want, double tol) {
        const bool hit = std::abs(got - want) <= tol;
        ok = ok && hit;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s=%.4f (want %.4f +- %.4f)", detail.empty() ? "" : "; ",
                      what, got, want, tol);
        detail += buf;
        if (!hit) detail += " MISS";
    }
    void expect(const char* what, bool cond) {
        ok = ok && cond;
        if (!cond) detail += std::string(detail.empty() ? "" : "; ") + what + " violated";
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

int failures = 0;

void report(int id, const char* name, const Check& c) {
    std::printf("%s criterion %d: %s: %s\n", c.ok ? "PASS" : "FAIL", id, name, c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

const BetaParams kVague{0.001, 0.001};

// 1. Empirical Bayes weights for a 40-subject control against 60/200.
void weight_table() {
    const auto t0 = Clock::now();
    const HistoricalControl hist(60, 200, 200);
    const double published[3][5] = {{0.020, 0.155, 1.000, 0.308, 0.040},
                                    {0.015, 0.181, 1.000, 0.236, 0.031},
                                    {0.014, 0.232, 1.000, 0.194, 0.026}};
    const BetaParams priors[3] = {{0.001, 0.001}, {0.5, 0.5}, {1, 1}};
    Check c;
    int hits = 0;
    double worst = 0;
    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 5; ++i) {
            const double w = weight_eb(4 * (i + 1), 40, hist, priors[p]);
            worst = std::max(worst, std::abs(w - published[p][i]));
            hits += std::abs(w - published[p][i]) <= 0.002;
        }
    const double secs = seconds_since(t0);
    c.expect("all 15 within 0.002", hits == 15);
    c.expect("runtime < 1 s", secs < 1.0);
    char buf[120];
    std::snprintf(buf, sizeof buf, "%d/15 within 0.002, max abs diff %.4f, %.3f s", hits, worst, secs);
    c.note(buf);
    report(1, "EB weight table", c);
}

// 2. Expected effective sample size at p_c = 0.27 for the two selected designs.
void eess_rows() {
    const auto t0 = Clock::now();
    const HistoricalControl h_eb = HistoricalControl::from_rate(0.27, 637, 31);
    const HistoricalControl h_bp = HistoricalControl::from_rate(0.27, 637, 45);
    const auto p_eb = BorrowingPolicy::for_history(EmpiricalBayes{}, 0.1, h_eb);
    const auto p_bp = BorrowingPolicy::for_history(BayesianP{1}, 0.1, h_bp);
    const double eb = eess(31, 0.27, h_eb, kVague, p_eb);
    const double bp = eess(30, 0.27, h_bp, kVague, p_bp);
    const double secs = seconds_since(t0);
    Check c;
    c.near("EB 31:62:31", eb, 22.47, 0.05);
    c.near("BP 30:60:45", bp, 23.75, 0.05);
    c.expect("runtime < 1 s", secs < 1.0);
    if (!c.ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "alternative n_ch_e*E[a*w_d*gate]: EB %.4f, BP %.4f",
                      eess_literal(31, 0.27, h_eb, kVague, p_eb),
                      eess_literal(30, 0.27, h_bp, kVague, p_bp));
        c.note(buf);
    }
    report(2, "EESS", c);
}

DesignSpec design_45(BorrowingMethod m, int n_ch_e, double delta_max) {
    const HistoricalControl h(54, 180, n_ch_e);
    return {45, 45, kVague, kVague, h, BorrowingPolicy::for_history(std::move(m), delta_max, h), 0.1};
}

std::vector<Scenario> column_scenarios() {
    std::vector<Scenario> s;
    for (double p : {0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45}) {
        s.push_back({p, p, 0.3});
        s.push_back({p, p + 0.2, 0.3});
    }
    return s;
}

// 3. Operating characteristics of two 45 + 45 designs, exact enumeration.
void oc_spot_checks() {
    const auto t0 = Clock::now();
    const auto scen = column_scenarios();
    const OutcomeGrid eb(design_45(EmpiricalBayes{}, 45, 0.1));
    const double tau_eb = calibrate_tau(eb, 0.3, ExactEnumeration{});
    const auto r_eb = oc_sweep(eb, scen, tau_eb, ExactEnumeration{});
    const OutcomeGrid fx(design_45(FixedWeight{}, 180, kNoGate));
    const double tau_fx = calibrate_tau(fx, 0.3, ExactEnumeration{});
    const auto r_fx = oc_sweep(fx, scen, tau_fx, ExactEnumeration{});
    const double secs = seconds_since(t0);

    // index 2k is type I at the k-th control rate, 2k + 1 its power
    Check c;
    c.near("EB type I @0.3", r_eb[6].reject_prob, 0.099, 0.006);
    c.near("EB power @0.3", r_eb[7].reject_prob, 0.811, 0.008);
    c.near("EB type I @0.4", r_eb[10].reject_prob, 0.150, 0.010);
    c.near("EB mean PMD @0.2", r_eb[2].mean_pmd, 0.009, 0.003);
    c.near("fixed-180 type I @0.45", r_fx[12].reject_prob, 0.644, 0.010);
    c.expect("28-scenario sweep < 60 s", secs < 60.0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "28 scenarios in %.2f s", secs);
    c.note(buf);
    report(3, "OC spot checks", c);
}

// 4. Type I error at p_c = 0.4 increases with the gate threshold.
void gate_direction() {
    Check c;
    const double delta[] = {0.05, 0.10, 0.15};
    const double published[] = {0.107, 0.150, 0.172};
    double prev = -1;
    for (int i = 0; i < 3; ++i) {
        const OutcomeGrid g(design_45(EmpiricalBayes{}, 45, delta[i]));
        const double tau = calibrate_tau(g, 0.3, ExactEnumeration{});
        const double t1 = operating_characteristics(g, {0.4, 0.4, 0.3}, tau, ExactEnumeration{}).reject_prob;
        char name[40];
        std::snprintf(name, sizeof name, "delta %.2f", delta[i]);
        c.near(name, t1, published[i], 0.01);
        c.expect("strictly increasing", t1 > prev);
        prev = t1;
    }
    report(4, "gate threshold direction", c);
}

// 5. Minimum sample size at 2:1 allocation for the two borrowing methods.
void optimization() {
    const auto t0 = Clock::now();
    Check c;
    SearchSetting s;
    s.y_ch = 172;
    s.n_ch = 637;
    s.p_hat_ch = 0.27;
    s.delta_max = 0.1;
    const OptimizationConstraints k;  // power 0.8, alpha 0.1
    const struct {
        const char* name;
        BorrowingMethod method;
        double mult;
        int want;
    } runs[] = {{"EB 2:1:1 n_c", EmpiricalBayes{}, 1.0, 31}, {"BP 2:1:1.5 n_c", BayesianP{1}, 1.5, 30}};
    for (const auto& r : runs) {
        s.method = r.method;
        const double mult[] = {r.mult};
        const auto grid = candidate_grid(20, 40, 1, 2.0, mult, s.n_ch);
        const auto res = min_sample_size(grid, k, 2.0, s);
        c.expect(r.name, res.feasible);
        c.near(r.name, res.selected.size.n_c, r.want, 1.0);
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.1f s", seconds_since(t0));
    c.note(buf);
    report(5, "sample size search", c);
}

BorrowingMethod random_method(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    switch (rng() % 5) {
        case 0: return EmpiricalBayes{};
        case 1: return BayesianP{0.5 + 1.5 * u(rng)};
        case 2: return GeneralizedBC{0.2 + 0.6 * u(rng), 0.5 + 1.5 * u(rng)};
        case 3: return JensenShannon{1 + 2 * u(rng)};
        default: return FixedWeight{};
    }
}

// 6. Library results against independent brute-force references.
void oracle_equivalence() {
    Check c;
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> u(0, 1);

    int oc_hits = 0;
    double worst_z = 0;
    std::string worst_at;
    for (int i = 0; i < 20; ++i) {
        const int n_c = 10 + static_cast<int>(rng() % 31);
        const int n_t = 10 + static_cast<int>(rng() % 31);
        const int n_ch = 50 + static_cast<int>(rng() % 251);
        const int y_ch = static_cast<int>(std::lround((0.15 + 0.4 * u(rng)) * n_ch));
        const int n_ch_e = static_cast<int>(rng() % (n_ch + 1));
        const double delta = u(rng) < 0.3 ? kNoGate : 0.05 + 0.2 * u(rng);
        const HistoricalControl h(y_ch, n_ch, n_ch_e);
        const BetaParams prior(0.001 + u(rng), 0.001 + u(rng));
        const DesignSpec d{n_c, n_t, prior, prior, h,
                           BorrowingPolicy::for_history(random_method(rng), delta, h), 0.1};
        const double p_c = 0.1 + 0.6 * u(rng);
        const Scenario s{p_c, std::min(0.95, p_c + 0.3 * u(rng)), h.rate()};
        const OutcomeGrid g(d);
        const double tau = calibrate_tau(g, h.rate(), ExactEnumeration{});
        const std::uint64_t n = 100000;
        const auto ex = operating_characteristics(g, s, tau, ExactEnumeration{});
        const auto mc = operating_characteristics(g, s, tau, MonteCarlo{n, 1000u + i});
        const double se_r = std::sqrt(ex.reject_prob * (1 - ex.reject_prob) / n);
        const double se_m = ex.sd_pmd / std::sqrt(double(n));
        const double se_x = std::sqrt(ex.xi_eps * (1 - ex.xi_eps) / n);
        const double zs[] = {std::abs(mc.reject_prob - ex.reject_prob) / std::max(se_r, 1e-300),
                             std::abs(mc.mean_pmd - ex.mean_pmd) / std::max(se_m, 1e-300),
                             std::abs(mc.xi_eps - ex.xi_eps) / std::max(se_x, 1e-300)};
        const char* metric[] = {"reject_prob", "mean_pmd", "xi_eps"};
        const bool hit = std::abs(mc.reject_prob - ex.reject_prob) <= 3 * se_r + 1e-12 &&
                         std::abs(mc.mean_pmd - ex.mean_pmd) <= 3 * se_m + 1e-12 &&
                         std::abs(mc.xi_eps - ex.xi_eps) <= 3 * se_x + 1e-12;
        oc_hits += hit;
        for (int m = 0; m < 3; ++m)
            if (zs[m] > worst_z) {
                worst_z = zs[m];
                worst_at = "config " + std::to_string(i) + " " + metric[m];
            }
    }

    int sup_hits = 0;
    double sup_worst = 0;
    for (int i = 0; i < 50; ++i) {
        const double at = 1 + 40 * u(rng), bt = 1 + 40 * u(rng);
        const double ac = 1 + 40 * u(rng), bc = 1 + 40 * u(rng);
        const double got = prob_superiority({at, bt}, {ac, bc});
        const double want = oracle::superiority_grid(at, bt, ac, bc);
        sup_worst = std::max(sup_worst, std::abs(got - want));
        sup_hits += std::abs(got - want) <= 1e-5;
    }

    int bc_hits = 0;
    double bc_worst = 0;
    for (int i = 0; i < 50; ++i) {
        const double a1 = 1 + 40 * u(rng), b1 = 1 + 40 * u(rng);
        const double a2 = 1 + 40 * u(rng), b2 = 1 + 40 * u(rng);
        const double got = generalized_bc({a1, b1}, {a2, b2}, 0.5, 1.0);
        const double want = oracle::bhattacharyya(a1, b1, a2, b2);
        bc_worst = std::max(bc_worst, std::abs(got - want));
        bc_hits += std::abs(got - want) <= 1e-6;
    }

    c.expect("exact vs MC within 3 SE", oc_hits == 20);
    c.expect("superiority vs grid within 1e-5", sup_hits == 50);
    c.expect("GBC vs Bhattacharyya within 1e-6", bc_hits == 50);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "OC %d/20 (max |z| %.2f at %s), superiority %d/50 (max %.1e), GBC %d/50 (max %.1e)",
                  oc_hits, worst_z, worst_at.c_str(), sup_hits, sup_worst, bc_hits, bc_worst);
    c.note(buf);
    report(6, "oracle equivalence", c);
}

// 7. Module invariants on random inputs.
void invariants() {
    Check c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    int cases = 0;

    for (int i = 0; i < 200; ++i) {
        const int n_c = 5 + static_cast<int>(rng() % 60);
        const int n_ch = 20 + static_cast<int>(rng() % 400);
        const HistoricalControl h(static_cast<int>(rng() % (n_ch + 1)), n_ch,
                                  static_cast<int>(rng() % (n_ch + 1)));
        const int y_c = static_cast<int>(rng() % (n_c + 1));
        const BetaParams prior(0.001 + 2 * u(rng), 0.001 + 2 * u(rng));
        const double delta = 0.02 + 0.3 * u(rng);
        const auto policy = BorrowingPolicy::for_history(random_method(rng), delta, h);
        const double wd = dynamic_weight(y_c, n_c, h, prior, policy);
        const auto w = realized_weight(y_c, n_c, h, prior, policy);
        const bool gate = std::abs(double(y_c) / n_c - h.rate()) < delta;
        c.expect("0 <= w_d <= 1", wd >= 0 && wd <= 1);
        c.expect("0 <= w <= a", w.overall >= 0 && w.overall <= h.global_weight() + 1e-15);
        c.expect("gate is strict", w.gate == gate);
        c.expect("closed gate borrows nothing", gate || w.overall == 0.0);
        const TrialOutcome o(y_c, n_c, 0, 1);
        if (!gate) c.expect("closed gate gives zero PMD", pmd(o, h, prior, w.overall) == 0.0);
        c.expect("a = 0 gives zero PMD", pmd(o, h.with_max_borrowed(0), prior, 0.0) == 0.0);

        const BetaParams f1(0.5 + 30 * u(rng), 0.5 + 30 * u(rng)), f2(0.5 + 30 * u(rng), 0.5 + 30 * u(rng));
        const double th = u(rng), eta = 0.5 + u(rng);
        c.expect("GBC theta symmetry",
                 std::abs(generalized_bc(f1, f2, th, eta) - generalized_bc(f2, f1, 1 - th, eta)) < 1e-9);
        const double g = generalized_bc(f1, f2, th, eta), j = jsd_similarity(f1, f2);
        c.expect("similarities in [0, 1]", g >= 0 && g <= 1 && j >= 0 && j <= 1);
        ++cases;
    }

    for (int i = 0; i < 4; ++i) {
        const HistoricalControl h(54, 180, 45 * (i + 1) / 2);
        const DesignSpec d{30, 30, kVague, kVague, h,
                           BorrowingPolicy::for_history(random_method(rng), 0.1, h), 0.05 + 0.1 * u(rng)};
        const OutcomeGrid g(d);
        const double tau = calibrate_tau(g, 0.3, ExactEnumeration{});
        c.expect("exact calibration bound",
                 operating_characteristics(g, {0.3, 0.3, 0.3}, tau, ExactEnumeration{}).reject_prob <= d.alpha);
        const MonteCarlo mc{20000, 5u + i};
        const auto one = operating_characteristics(g, {0.35, 0.5, 0.3}, tau, mc, 0.01, {1});
        const auto four = operating_characteristics(g, {0.35, 0.5, 0.3}, tau, mc, 0.01, {4});
        c.expect("thread-count reproducibility", one.reject_prob == four.reject_prob &&
                                                     one.mean_pmd == four.mean_pmd &&
                                                     one.xi_eps == four.xi_eps);
        c.expect("MC calibration thread invariance",
                 calibrate_tau(g, 0.3, mc, {1}) == calibrate_tau(g, 0.3, mc, {3}));
        ++cases;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%d random cases", cases);
    c.note(buf);
    report(7, "invariants", c);
}

}  // namespace

int main() {
    weight_table();
    eess_rows();
    oc_spot_checks();
    gate_direction();
    optimization();
    oracle_equivalence();
    invariants();
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
