#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include "dpp/quadrature.hpp"

namespace dpp {

// Shape pair of a beta distribution. Both shapes are finite and positive;
// ln B(alpha, beta) is computed once at construction.
class BetaParams {
public:
    BetaParams(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double log_beta() const noexcept { return log_beta_; }
    double mean() const noexcept { return alpha_ / (alpha_ + beta_); }

    // The mirrored distribution of 1 - X.
    BetaParams swapped() const { return {beta_, alpha_}; }

    friend bool operator==(const BetaParams& l, const BetaParams& r) noexcept {
        return l.alpha_ == r.alpha_ && l.beta_ == r.beta_;
    }

private:
    double alpha_;
    double beta_;
    double log_beta_;
};

// A point of the open unit interval carried together with ln x and ln(1 - x).
// Quantiles of strongly skewed shapes (alpha ~ 1e-3) underflow x long before
// ln x becomes inaccurate, so downstream densities and CDFs read the logs.
struct UnitPoint {
    double x;
    double log_x;
    double log1m_x;

    static UnitPoint from_x(double x);
    static UnitPoint from_log_x(double log_x);
    static UnitPoint from_log1m_x(double log1m_x);

    UnitPoint reflected() const noexcept;
};

// ln B(a, b) via log-gamma. Throws DomainError unless a > 0 and b > 0.
double log_beta_fn(double a, double b);

double beta_log_pdf(const UnitPoint& point, const BetaParams& p) noexcept;

// Density at x in (0, 1); computed in log space.
double beta_pdf(double x, const BetaParams& p);

// Regularized incomplete beta I_x(alpha, beta), x in [0, 1].
double beta_cdf(double x, const BetaParams& p);
double beta_cdf(const UnitPoint& point, const BetaParams& p);

// Inverse CDF for u in (0, 1). The point form takes the exact complement
// 1 - u so that upper-tail quantiles keep full precision.
double beta_quantile(double u, const BetaParams& p);
UnitPoint beta_quantile_point(double u, double u_complement, const BetaParams& p);

// P(X_t > X_c) for independent X_t ~ t, X_c ~ c.
double prob_superiority(const BetaParams& t, const BetaParams& c);

// Evaluates P(X_t > X_c) for a fixed t against many c. The quantile nodes of
// t are computed once per refinement level and shared; the object may be
// used from several threads.
class SuperiorityIntegrator {
public:
    explicit SuperiorityIntegrator(BetaParams treatment,
                                   QuadratureSettings settings = {});

    const BetaParams& treatment() const noexcept { return treatment_; }

    // Throws NumericError if neither the direct nor the mirrored quadrature
    // converges within the node budget.
    double probability_exceeds(const BetaParams& control) const;

    // Integral of F_c(Q_t(u)) over the unit interval; exposed for diagnostics.
    QuadratureResult integrate_cdf(const BetaParams& control) const;

private:
    static constexpr std::size_t kMaxLevels = 8;

    const std::vector<UnitPoint>& level_points(std::size_t level) const;

    BetaParams treatment_;
    QuadratureSettings settings_;
    std::size_t levels_ = 0;
    mutable std::array<std::once_flag, kMaxLevels> once_;
    mutable std::array<std::vector<UnitPoint>, kMaxLevels> points_;
};

}  // namespace dpp
