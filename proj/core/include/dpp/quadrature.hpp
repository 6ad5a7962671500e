#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dpp {

// Gauss-Legendre rule mapped to [0, 1]. Nodes ascend; weights sum to 1.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    // 1 - node, exact for each node (needed near the right endpoint).
    std::vector<double> complements;
};

GaussLegendreRule make_gauss_legendre(std::size_t order);

// Composite rule: `panels` equal subintervals of [0, 1], each carrying the
// `order`-point rule. With grading m > 1 the nodes are pushed through
// u = v^m / (v^m + (1 - v)^m), which clusters them at both endpoints and
// tames integrands like u^0.001 there. Shared instances are built once per
// process.
const GaussLegendreRule& composite_gauss_legendre(std::size_t order, std::size_t panels,
                                                  unsigned grading = 1);

struct QuadratureSettings {
    std::size_t order = 128;
    std::size_t max_panels = 8;  // 8 x 128 = 1024 nodes
    double tolerance = 1e-9;
    unsigned grading = 3;
};

struct QuadratureResult {
    double value = 0.0;
    double last_change = 0.0;
    std::size_t nodes_used = 0;
    bool converged = false;
};

// Integrates over [0, 1], doubling the number of panels until two successive
// estimates differ by less than the tolerance. The integrand receives the
// node and its exact complement 1 - node.
QuadratureResult integrate_unit_interval(
    const std::function<double(double u, double u_complement)>& integrand,
    const QuadratureSettings& settings = {});

}  // namespace dpp
