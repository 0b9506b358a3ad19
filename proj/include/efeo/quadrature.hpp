#pragma once

#include <functional>
#include <span>
#include <vector>

namespace efeo {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

/// Newton iteration on the Legendre recurrence; accurate to a few ulps.
GaussRule make_gauss_legendre(int order);
/// Cached rule for orders 1..64.
const GaussRule& gauss_legendre(int order);

/// Integral of fn over [a, b] with a single application of `rule`.
template <class Fn>
double integrate(const GaussRule& rule, double a, double b, Fn&& fn) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int q = 0; q < rule.order(); ++q) sum += rule.weights[q] * fn(mid + half * rule.nodes[q]);
    return half * sum;
}

struct LayerQuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-14;
    int max_refinements = 14;  ///< panel doublings per piece before giving up
    int points_per_panel = 10;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Graded breakpoints p + scale * {0, +-1, +-2, +-4, ...} clipped to [a, b]
/// for every layer point p, plus the interval ends.
std::vector<double> layer_breakpoints(double a, double b, std::span<const double> layer_points,
                                      double scale);

/// Composite Gauss-Legendre on the graded partition. Each piece is refined by
/// panel doubling until successive estimates differ by less than
/// max(abs_tol / pieces, rel_tol * int_piece |fn|), or by less than the
/// rounding level of the panel sums. Throws NumericalError when a piece fails
/// to converge within max_refinements.
QuadratureResult layer_quadrature(const std::function<double(double)>& fn, double a, double b,
                                  std::span<const double> layer_points, double scale,
                                  const LayerQuadratureOptions& options = {});

}  // namespace efeo
