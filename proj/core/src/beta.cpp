#include "dpp/beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpp/errors.hpp"
#include "special.hpp"

namespace dpp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 20000;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double md = static_cast<double>(m);
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    std::ostringstream msg;
    msg << "incomplete beta continued fraction did not converge (x=" << x << ", a=" << a
        << ", b=" << b << ")";
    throw NumericError(msg.str());
}

// I_x(a, b) by the direct continued fraction; accurate for x <= a/(a+b).
double lower_regularized(const UnitPoint& pt, double a, double b, double log_beta_ab) {
    if (pt.x <= 0.0 && pt.log_x == -kInf) return 0.0;
    const double log_front = a * pt.log_x + b * pt.log1m_x - log_beta_ab;
    if (log_front < -745.0) return 0.0;
    return std::exp(log_front) * beta_continued_fraction(pt.x, a, b) / a;
}

void require_open_unit(double u, const char* what) {
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream msg;
        msg << what << " must lie in (0, 1), got " << u;
        throw DomainError(msg.str());
    }
}

// Solves I_x(a, b) = u for x <= a/(a+b), in t = ln x so that quantiles far
// below the smallest double keep an exact logarithm.
UnitPoint solve_lower_quantile(double u, double a, double b, double log_beta_ab) {
    const double t_mean = std::log(a / (a + b));
    auto value_at = [&](double t) {
        return lower_regularized(UnitPoint::from_log_x(t), a, b, log_beta_ab) - u;
    };

    double t_hi = t_mean;
    double t = std::min(t_mean, (std::log(u) + std::log(a) + log_beta_ab) / a);

    // Find a left bracket where the CDF is below u.
    double t_lo = t;
    double step = 1.0;
    double g_lo = value_at(t_lo);
    while (g_lo >= 0.0) {
        t_hi = std::min(t_hi, t_lo);
        t_lo -= step * std::max(1.0, std::abs(t_lo));
        step *= 2.0;
        if (t_lo < -1e300) return UnitPoint::from_log_x(t_hi);
        g_lo = value_at(t_lo);
    }
    if (!(t > t_lo && t < t_hi)) t = 0.5 * (t_lo + t_hi);

    for (int iter = 0; iter < 300; ++iter) {
        const UnitPoint pt = UnitPoint::from_log_x(t);
        const double g = lower_regularized(pt, a, b, log_beta_ab) - u;
        if (g == 0.0) return pt;
        if (g > 0.0)
            t_hi = t;
        else
            t_lo = t;
        // d I / d ln x = x f(x)
        const double slope = std::exp(a * pt.log_x + (b - 1.0) * pt.log1m_x - log_beta_ab);
        double next = (slope > 0.0 && std::isfinite(slope)) ? t - g / slope : t_lo;
        if (!(next > t_lo && next < t_hi)) next = 0.5 * (t_lo + t_hi);
        const double scale = std::max(1.0, std::abs(t));
        if (std::abs(next - t) <= 4e-16 * scale || (t_hi - t_lo) <= 4e-16 * scale)
            return UnitPoint::from_log_x(next);
        t = next;
    }
    std::ostringstream msg;
    msg << "beta quantile did not converge (u=" << u << ", a=" << a << ", b=" << b << ")";
    throw NumericError(msg.str());
}

}  // namespace

BetaParams::BetaParams(double alpha, double beta)
    : alpha_(alpha), beta_(beta), log_beta_(log_beta_fn(alpha, beta)) {}

UnitPoint UnitPoint::from_x(double x) {
    return {x, std::log(x), std::log1p(-x)};
}

UnitPoint UnitPoint::from_log_x(double log_x) {
    const double x = std::exp(log_x);
    return {x, log_x, std::log1p(-x)};
}

UnitPoint UnitPoint::from_log1m_x(double log1m_x) {
    const double x = -std::expm1(log1m_x);
    return {x, std::log(x), log1m_x};
}

UnitPoint UnitPoint::reflected() const noexcept {
    return {std::exp(log1m_x), log1m_x, log_x};
}

double log_beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        std::ostringstream msg;
        msg << "beta shapes must be finite and positive, got (" << a << ", " << b << ")";
        throw DomainError(msg.str());
    }
    const double small = std::min(a, b), large = std::max(a, b);
    if (large < 20.0)
        return detail::log_gamma(a) + detail::log_gamma(b) - detail::log_gamma(a + b);
    // ln G(large) - ln G(large + small) from Stirling's series, avoiding the
    // cancellation between two huge log-gammas.
    auto correction = [](double x) {
        const double r = 1.0 / (x * x);
        return (1.0 / 12 - r * (1.0 / 360 - r * (1.0 / 1260 - r / 1680))) / x;
    };
    const double sum = small + large;
    return detail::log_gamma(small) - (large - 0.5) * std::log1p(small / large) -
           small * std::log(sum) + small + correction(large) - correction(sum);
}

double beta_log_pdf(const UnitPoint& point, const BetaParams& p) noexcept {
    const double left = p.alpha() == 1.0 ? 0.0 : (p.alpha() - 1.0) * point.log_x;
    const double right = p.beta() == 1.0 ? 0.0 : (p.beta() - 1.0) * point.log1m_x;
    return left + right - p.log_beta();
}

double beta_pdf(double x, const BetaParams& p) {
    require_open_unit(x, "beta_pdf argument");
    return std::exp(beta_log_pdf(UnitPoint::from_x(x), p));
}

double beta_cdf(double x, const BetaParams& p) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream msg;
        msg << "beta_cdf argument must lie in [0, 1], got " << x;
        throw DomainError(msg.str());
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    return beta_cdf(UnitPoint::from_x(x), p);
}

double beta_cdf(const UnitPoint& point, const BetaParams& p) {
    if (point.x <= 0.0 && point.log_x == -kInf) return 0.0;
    if (point.x >= 1.0 && point.log1m_x == -kInf) return 1.0;
    double value;
    if (point.x <= p.mean()) {
        value = lower_regularized(point, p.alpha(), p.beta(), p.log_beta());
    } else {
        value = 1.0 - lower_regularized(point.reflected(), p.beta(), p.alpha(), p.log_beta());
    }
    return std::clamp(value, 0.0, 1.0);
}

UnitPoint beta_quantile_point(double u, double u_complement, const BetaParams& p) {
    require_open_unit(u, "beta_quantile probability");
    const double mean = p.mean();
    const double cdf_at_mean =
        lower_regularized(UnitPoint::from_x(mean), p.alpha(), p.beta(), p.log_beta());
    if (u <= cdf_at_mean) return solve_lower_quantile(u, p.alpha(), p.beta(), p.log_beta());
    return solve_lower_quantile(u_complement, p.beta(), p.alpha(), p.log_beta()).reflected();
}

double beta_quantile(double u, const BetaParams& p) {
    return beta_quantile_point(u, 1.0 - u, p).x;
}

double prob_superiority(const BetaParams& t, const BetaParams& c) {
    return SuperiorityIntegrator(t).probability_exceeds(c);
}

SuperiorityIntegrator::SuperiorityIntegrator(BetaParams treatment, QuadratureSettings settings)
    : treatment_(treatment), settings_(settings) {
    for (std::size_t panels = 1; panels <= settings_.max_panels; panels *= 2) ++levels_;
    if (levels_ == 0 || levels_ > kMaxLevels)
        throw DomainError("quadrature refinement must use between 1 and 8 levels");
}

const std::vector<UnitPoint>& SuperiorityIntegrator::level_points(std::size_t level) const {
    std::call_once(once_[level], [&] {
        const auto& rule = composite_gauss_legendre(settings_.order, std::size_t{1} << level,
                                                      settings_.grading);
        auto& pts = points_[level];
        pts.reserve(rule.nodes.size());
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            pts.push_back(beta_quantile_point(rule.nodes[i], rule.complements[i], treatment_));
    });
    return points_[level];
}

QuadratureResult SuperiorityIntegrator::integrate_cdf(const BetaParams& control) const {
    QuadratureResult result;
    double previous = 0.0;
    for (std::size_t level = 0; level < levels_; ++level) {
        const auto& rule = composite_gauss_legendre(settings_.order, std::size_t{1} << level,
                                                      settings_.grading);
        const auto& pts = level_points(level);
        double sum = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            sum += rule.weights[i] * beta_cdf(pts[i], control);
        result.value = sum;
        result.nodes_used = pts.size();
        if (level > 0) {
            result.last_change = std::abs(sum - previous);
            if (result.last_change < settings_.tolerance) {
                result.converged = true;
                break;
            }
        }
        previous = sum;
    }
    return result;
}

double SuperiorityIntegrator::probability_exceeds(const BetaParams& control) const {
    // P(X_t > X_c) = E_t[F_c(X_t)] = integral of F_c(Q_t(u)) du.
    const QuadratureResult direct = integrate_cdf(control);
    if (direct.converged) return std::clamp(direct.value, 0.0, 1.0);

    // Same probability from the other side: 1 - E_c[F_t(X_c)].
    const SuperiorityIntegrator mirrored(control, settings_);
    const QuadratureResult other = mirrored.integrate_cdf(treatment_);
    if (other.converged) return std::clamp(1.0 - other.value, 0.0, 1.0);

    std::ostringstream msg;
    msg << "P(X_t > X_c) quadrature did not converge for t=Beta(" << treatment_.alpha() << ", "
        << treatment_.beta() << "), c=Beta(" << control.alpha() << ", " << control.beta()
        << "): change " << direct.last_change << " / " << other.last_change << " at "
        << direct.nodes_used << " nodes (tolerance " << settings_.tolerance << ")";
    throw NumericError(msg.str());
}

}  // namespace dpp
