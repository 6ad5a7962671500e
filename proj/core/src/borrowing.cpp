#include "dpp/borrowing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dpp/errors.hpp"
#include "dpp/quadrature.hpp"
#include "special.hpp"

namespace dpp {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Floor for densities inside logarithms of ratios.
const double kLogDensityFloor = std::log(1e-300);

double floored(double log_density) noexcept { return std::max(log_density, kLogDensityFloor); }

void require_counts(int y, int n, const char* what) {
    if (n < 1 || y < 0 || y > n) {
        std::ostringstream msg;
        msg << what << ": need 0 <= y <= n and n >= 1, got y=" << y << ", n=" << n;
        throw DomainError(msg.str());
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be finite and positive, got " << v;
        throw DomainError(msg.str());
    }
}

void require_unit_closed(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << what << " must lie in [0, 1], got " << v;
        throw DomainError(msg.str());
    }
}

// E_f[g(X)] as the integral over u of g(Q_f(u)).
template <class Fn>
QuadratureResult expectation_under(const BetaParams& f, Fn&& g) {
    return integrate_unit_interval([&](double u, double uc) {
        return g(beta_quantile_point(u, uc, f));
    });
}

[[noreturn]] void quadrature_failure(const char* what, const BetaParams& f_c,
                                     const BetaParams& f_ch, const QuadratureResult& r) {
    std::ostringstream msg;
    msg << what << " quadrature did not converge for Beta(" << f_c.alpha() << ", " << f_c.beta()
        << ") vs Beta(" << f_ch.alpha() << ", " << f_ch.beta() << "): last change "
        << r.last_change << " at " << r.nodes_used << " nodes";
    throw NumericError(msg.str());
}

// integral of f_from^(1-theta) f_to^theta. The integrand is an unnormalized
// beta density, so the overlap is a ratio of beta functions.
double tilted_overlap(const BetaParams& from, const BetaParams& to, double theta) {
    const double a = (1.0 - theta) * from.alpha() + theta * to.alpha();
    const double b = (1.0 - theta) * from.beta() + theta * to.beta();
    return std::exp(log_beta_fn(a, b) - (1.0 - theta) * from.log_beta() - theta * to.log_beta());
}

// KL(f || (f + g)/2) in bits.
double kl_to_midpoint(const BetaParams& f, const BetaParams& g) {
    auto log_ratio = [&](const UnitPoint& x) {
        const double lf = floored(beta_log_pdf(x, f));
        const double lg = floored(beta_log_pdf(x, g));
        const double hi = std::max(lf, lg);
        const double log_mid = hi + std::log1p(std::exp(std::min(lf, lg) - hi)) - std::numbers::ln2;
        return (lf - log_mid) / std::numbers::ln2;
    };
    auto r = expectation_under(f, log_ratio);
    if (r.converged) return r.value;
    const auto alt = expectation_under(g, [&](const UnitPoint& x) {
        const double ratio = std::exp(floored(beta_log_pdf(x, f)) - floored(beta_log_pdf(x, g)));
        return ratio * log_ratio(x);
    });
    if (alt.converged) return alt.value;
    quadrature_failure("Kullback-Leibler", f, g, r);
}

}  // namespace

HistoricalControl::HistoricalControl(int y_ch, int n_ch, int n_ch_e)
    : y_ch_(y_ch), n_ch_(n_ch), n_ch_e_(n_ch_e) {
    require_counts(y_ch, n_ch, "historical control");
    if (n_ch_e < 0 || n_ch_e > n_ch) {
        std::ostringstream msg;
        msg << "n_ch_e must lie in [0, n_ch=" << n_ch << "], got " << n_ch_e;
        throw DomainError(msg.str());
    }
}

HistoricalControl HistoricalControl::from_rate(double rate, int n_ch, int n_ch_e) {
    require_unit_closed(rate, "historical response rate");
    return {static_cast<int>(std::lround(rate * n_ch)), n_ch, n_ch_e};
}

std::string method_tag(const BorrowingMethod& method) {
    return std::visit(overloaded{
                          [](const EmpiricalBayes&) { return std::string("eb"); },
                          [](const BayesianP&) { return std::string("bp"); },
                          [](const GeneralizedBC&) { return std::string("gbc"); },
                          [](const JensenShannon&) { return std::string("jsd"); },
                          [](const FixedWeight&) { return std::string("fixed"); },
                      },
                      method);
}

void validate_method(const BorrowingMethod& method) {
    std::visit(overloaded{
                   [](const EmpiricalBayes&) {},
                   [](const FixedWeight&) {},
                   [](const BayesianP& m) { require_positive(m.eta, "Bayesian P eta"); },
                   [](const JensenShannon& m) { require_positive(m.eta, "JSD eta"); },
                   [](const GeneralizedBC& m) {
                       require_positive(m.eta, "GBC eta");
                       if (!(m.theta > 0.0 && m.theta < 1.0)) {
                           std::ostringstream msg;
                           msg << "GBC theta must lie in (0, 1), got " << m.theta;
                           throw DomainError(msg.str());
                       }
                   },
               },
               method);
}

BorrowingPolicy::BorrowingPolicy(BorrowingMethod method, double delta_max, double global_a)
    : method_(std::move(method)), delta_max_(delta_max), global_a_(global_a) {
    validate_method(method_);
    if (!(delta_max_ >= 0.0)) {
        std::ostringstream msg;
        msg << "delta_max must be nonnegative (0 never opens the gate), got " << delta_max_;
        throw DomainError(msg.str());
    }
    require_unit_closed(global_a_, "global borrowing weight a");
}

double eb_objective(double w, int y_c, int n_c, const HistoricalControl& hist,
                    const BetaParams& prior) {
    const double a_hist = prior.alpha() + w * hist.responders();
    const double b_hist = prior.beta() + w * hist.non_responders();
    return log_beta_fn(a_hist + y_c, b_hist + (n_c - y_c)) - log_beta_fn(a_hist, b_hist);
}

double weight_eb(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior) {
    require_counts(y_c, n_c, "concurrent control");
    constexpr int kGrid = 1000;
    constexpr double kTol = 1e-6;

    auto f = [&](double w) { return eb_objective(w, y_c, n_c, hist, prior); };

    int best = 0;
    double best_value = f(0.0);
    for (int i = 1; i <= kGrid; ++i) {
        const double v = f(static_cast<double>(i) / kGrid);
        if (v >= best_value) {  // ties go to the larger weight
            best_value = v;
            best = i;
        }
    }

    // Golden-section search on the cells adjacent to the best grid point.
    double lo = static_cast<double>(std::max(best - 1, 0)) / kGrid;
    double hi = static_cast<double>(std::min(best + 1, kGrid)) / kGrid;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > kTol) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double refined = 0.5 * (lo + hi);
    const double best_w = static_cast<double>(best) / kGrid;
    if (best_value >= f(refined)) return best_w;  // includes exact 0 and 1
    return std::clamp(refined, 0.0, 1.0);
}

ComparedPosteriors compared_posteriors(int y_c, int n_c, const HistoricalControl& hist,
                                       const BetaParams& prior, double global_a) {
    require_counts(y_c, n_c, "concurrent control");
    require_unit_closed(global_a, "global borrowing weight a");
    return {
        BetaParams(prior.alpha() + y_c, prior.beta() + (n_c - y_c)),
        BetaParams(prior.alpha() + global_a * hist.responders(),
                   prior.beta() + global_a * hist.non_responders()),
    };
}

double bayesian_p_similarity(const BetaParams& f_c, const BetaParams& f_ch, double eta) {
    require_positive(eta, "Bayesian P eta");
    const double xi1 = prob_superiority(f_c, f_ch);  // P(p_c >= p_ch); ties have measure zero
    const double xi2 = 1.0 - xi1;
    return std::clamp(std::pow(2.0 * std::min(xi1, xi2), eta), 0.0, 1.0);
}

double generalized_bc(const BetaParams& f_c, const BetaParams& f_ch, double theta, double eta) {
    validate_method(GeneralizedBC{theta, eta});
    if (f_c == f_ch) return 1.0;
    const double forward = tilted_overlap(f_c, f_ch, theta);   // E_c[(f_ch/f_c)^theta]
    const double backward = tilted_overlap(f_ch, f_c, theta);  // E_ch[(f_c/f_ch)^theta]
    const double base = std::clamp(0.5 * (forward + backward), 0.0, 1.0);
    return std::clamp(std::pow(base, eta), 0.0, 1.0);
}

double jsd_similarity(const BetaParams& f_c, const BetaParams& f_ch) {
    if (f_c == f_ch) return 1.0;
    const double divergence = 0.5 * (kl_to_midpoint(f_c, f_ch) + kl_to_midpoint(f_ch, f_c));
    return std::clamp(1.0 - divergence, 0.0, 1.0);
}

double weight_bp(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                 double eta, double global_a) {
    const auto post = compared_posteriors(y_c, n_c, hist, prior, global_a);
    return bayesian_p_similarity(post.concurrent, post.historical, eta);
}

double weight_gbc(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                  double theta, double eta, double global_a) {
    const auto post = compared_posteriors(y_c, n_c, hist, prior, global_a);
    return generalized_bc(post.concurrent, post.historical, theta, eta);
}

double weight_jsd(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                  double eta, double global_a) {
    require_positive(eta, "JSD eta");
    const auto post = compared_posteriors(y_c, n_c, hist, prior, global_a);
    return std::clamp(std::pow(jsd_similarity(post.concurrent, post.historical), eta), 0.0, 1.0);
}

double dynamic_weight(int y_c, int n_c, const HistoricalControl& hist, const BetaParams& prior,
                      const BorrowingPolicy& policy) {
    const double a = policy.global_a();
    return std::visit(
        overloaded{
            [&](const EmpiricalBayes&) { return weight_eb(y_c, n_c, hist, prior); },
            [&](const BayesianP& m) { return weight_bp(y_c, n_c, hist, prior, m.eta, a); },
            [&](const GeneralizedBC& m) {
                return weight_gbc(y_c, n_c, hist, prior, m.theta, m.eta, a);
            },
            [&](const JensenShannon& m) { return weight_jsd(y_c, n_c, hist, prior, m.eta, a); },
            [&](const FixedWeight&) {
                require_counts(y_c, n_c, "concurrent control");
                return 1.0;
            },
        },
        policy.method());
}

std::vector<double> dynamic_weights(int n_c, const HistoricalControl& hist,
                                    const BetaParams& prior, const BorrowingPolicy& policy) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_c) + 1);
    for (int y = 0; y <= n_c; ++y) out.push_back(dynamic_weight(y, n_c, hist, prior, policy));
    return out;
}

bool gate_open(double p_hat_c, double p_hat_ch, double delta_max) noexcept {
    return std::abs(p_hat_c - p_hat_ch) < delta_max;
}

bool gate_open(int y_c, int n_c, const HistoricalControl& hist, double delta_max) noexcept {
    return gate_open(static_cast<double>(y_c) / n_c, hist.rate(), delta_max);
}

double overall_weight(double w_d, const BorrowingPolicy& policy, double p_hat_c,
                      double p_hat_ch) noexcept {
    if (!gate_open(p_hat_c, p_hat_ch, policy.delta_max())) return 0.0;
    return policy.global_a() * w_d;
}

double binomial_pmf(int k, int n, double p) {
    require_unit_closed(p, "binomial probability");
    if (n < 0) throw DomainError("binomial size must be non-negative");
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    const double log_choose = detail::log_gamma(n + 1.0) - detail::log_gamma(k + 1.0) -
                              detail::log_gamma(n - k + 1.0);
    return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

std::vector<double> binomial_pmf_table(int n, double p) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = binomial_pmf(k, n, p);
    return out;
}

namespace {

// E[w_d 1{gate}] over y_c ~ Binomial(n_c, p_c)
double expected_gated_weight(int n_c, double p_c, const HistoricalControl& hist,
                             const BetaParams& prior, const BorrowingPolicy& policy) {
    require_unit_closed(p_c, "control response rate");
    if (n_c < 1) throw DomainError("n_c must be at least 1");
    double total = 0.0;
    for (int y = 0; y <= n_c; ++y) {
        if (!gate_open(y, n_c, hist, policy.delta_max())) continue;
        const double pmf = binomial_pmf(y, n_c, p_c);
        if (pmf == 0.0) continue;
        total += pmf * dynamic_weight(y, n_c, hist, prior, policy);
    }
    return total;
}

}  // namespace

double eess(int n_c, double p_c, const HistoricalControl& hist, const BetaParams& prior,
            const BorrowingPolicy& policy) {
    if (policy.global_a() == 0.0) return 0.0;
    return hist.size() * policy.global_a() *
           expected_gated_weight(n_c, p_c, hist, prior, policy);
}

double eess_literal(int n_c, double p_c, const HistoricalControl& hist,
                    const BetaParams& prior, const BorrowingPolicy& policy) {
    if (policy.global_a() == 0.0) return 0.0;
    return hist.max_borrowed() * policy.global_a() *
           expected_gated_weight(n_c, p_c, hist, prior, policy);
}

}  // namespace dpp
