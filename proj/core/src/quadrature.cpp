#include "dpp/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <utility>

#include "dpp/errors.hpp"

namespace dpp {

GaussLegendreRule make_gauss_legendre(std::size_t order) {
    if (order == 0) throw DomainError("Gauss-Legendre order must be positive");

    // Newton iteration on P_n from the Tricomi initial guesses; nodes on
    // [-1, 1] are computed for the lower half and mirrored.
    const std::size_t n = order;
    std::vector<double> x(n), w(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                const double jd = static_cast<double>(j);
                p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double step = p0 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }

    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.complements.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // (1 + x)/2 and (1 - x)/2 are both computed directly so that nodes
        // close to either endpoint keep full relative precision.
        rule.nodes[i] = 0.5 * (1.0 + x[i]);
        rule.complements[i] = 0.5 * (1.0 - x[i]);
        rule.weights[i] = 0.5 * w[i];
    }
    return rule;
}

namespace {

void apply_grading(GaussLegendreRule& rule, unsigned m) {
    const double md = static_cast<double>(m);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = rule.nodes[i], vc = rule.complements[i];
        const double a = std::pow(v, md), b = std::pow(vc, md);
        const double s = a + b;
        rule.weights[i] *= md * std::pow(v * vc, md - 1.0) / (s * s);
        rule.nodes[i] = a / s;
        rule.complements[i] = b / s;
    }
}

}  // namespace

const GaussLegendreRule& composite_gauss_legendre(std::size_t order, std::size_t panels,
                                                  unsigned grading) {
    static std::mutex mutex;
    static std::map<std::tuple<std::size_t, std::size_t, unsigned>,
                    std::unique_ptr<GaussLegendreRule>>
        cache;

    std::lock_guard lock(mutex);
    auto& slot = cache[{order, panels, grading}];
    if (!slot) {
        if (panels == 0) throw DomainError("composite rule needs at least one panel");
        if (grading == 0) throw DomainError("grading exponent must be at least 1");
        const GaussLegendreRule base = make_gauss_legendre(order);
        auto rule = std::make_unique<GaussLegendreRule>();
        const double width = 1.0 / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double left = static_cast<double>(p) * width;
            const double right_gap = static_cast<double>(panels - 1 - p) * width;
            for (std::size_t i = 0; i < order; ++i) {
                rule->nodes.push_back(left + width * base.nodes[i]);
                rule->complements.push_back(right_gap + width * base.complements[i]);
                rule->weights.push_back(width * base.weights[i]);
            }
        }
        if (grading > 1) apply_grading(*rule, grading);
        slot = std::move(rule);
    }
    return *slot;
}

QuadratureResult integrate_unit_interval(
    const std::function<double(double, double)>& integrand,
    const QuadratureSettings& settings) {
    QuadratureResult result;
    double previous = 0.0;
    for (std::size_t panels = 1; panels <= settings.max_panels; panels *= 2) {
        const auto& rule = composite_gauss_legendre(settings.order, panels, settings.grading);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            sum += rule.weights[i] * integrand(rule.nodes[i], rule.complements[i]);
        result.nodes_used = rule.nodes.size();
        result.value = sum;
        if (panels > 1) {
            result.last_change = std::abs(sum - previous);
            if (result.last_change < settings.tolerance) {
                result.converged = true;
                return result;
            }
        }
        previous = sum;
    }
    return result;
}

}  // namespace dpp
