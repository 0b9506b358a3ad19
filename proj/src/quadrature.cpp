#include "efeo/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "efeo/error.hpp"

namespace efeo {

GaussRule make_gauss_legendre(int order) {
    EFEO_REQUIRE(order >= 1, "gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
    }
    if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
    return rule;
}

const GaussRule& gauss_legendre(int order) {
    EFEO_REQUIRE(order >= 1 && order <= 64, "gauss_legendre: cached orders are 1..64");
    static const std::array<GaussRule, 64> rules = [] {
        std::array<GaussRule, 64> r;
        for (int n = 1; n <= 64; ++n) r[static_cast<std::size_t>(n - 1)] = make_gauss_legendre(n);
        return r;
    }();
    return rules[static_cast<std::size_t>(order - 1)];
}

std::vector<double> layer_breakpoints(double a, double b, std::span<const double> layer_points,
                                      double scale) {
    std::vector<double> pts{a, b};
    if (scale > 0.0) {
        for (double p : layer_points) {
            if (p >= a && p <= b) pts.push_back(p);
            for (double k = 1.0;; k *= 2.0) {
                const double off = k * scale;
                bool inside = false;
                if (p - off > a && p - off < b) {
                    pts.push_back(p - off);
                    inside = true;
                }
                if (p + off > a && p + off < b) {
                    pts.push_back(p + off);
                    inside = true;
                }
                // Stop once both offsets are past the interval.
                if (!inside && (p - off <= a) && (p + off >= b)) break;
                if (k > 1e300) break;
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

namespace {

// Also accumulates the integral of |fn| into *magnitude when given.
double composite(const std::function<double(double)>& fn, const GaussRule& rule, double a, double b,
                 int panels, int& evals, double* magnitude = nullptr) {
    double sum = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        // half-width from w, not from nearly equal endpoint values
        const double mid = a + (p + 0.5) * w, half = 0.5 * w;
        double s = 0.0, m = 0.0;
        for (int q = 0; q < rule.order(); ++q) {
            const double v = rule.weights[q] * fn(mid + half * rule.nodes[q]);
            s += v;
            m += std::abs(v);
        }
        sum += half * s;
        if (magnitude) *magnitude += half * m;
    }
    evals += panels * rule.order();
    return sum;
}

}  // namespace

QuadratureResult layer_quadrature(const std::function<double(double)>& fn, double a, double b,
                                  std::span<const double> layer_points, double scale,
                                  const LayerQuadratureOptions& options) {
    EFEO_REQUIRE(options.abs_tol > 0.0 || options.rel_tol > 0.0, "layer_quadrature: tolerance must be > 0");
    EFEO_REQUIRE(a <= b, "layer_quadrature: need a <= b");
    QuadratureResult result;
    if (a == b) return result;
    const GaussRule& rule = gauss_legendre(options.points_per_panel);
    const std::vector<double> pts = layer_breakpoints(a, b, layer_points, scale);
    const std::size_t pieces = pts.size() - 1;

    // Coarse pass fixes the per-piece magnitude (integral of |fn|) that scales
    // the relative tolerance, so cancelling integrands do not chase noise.
    std::vector<double> coarse(pieces), magnitude(pieces, 0.0);
    for (std::size_t i = 0; i < pieces; ++i)
        coarse[i] = composite(fn, rule, pts[i], pts[i + 1], 1, result.evaluations, &magnitude[i]);
    const double abs_share = options.abs_tol / static_cast<double>(pieces);

    double value = 0.0;
    for (std::size_t i = 0; i < pieces; ++i) {
        double prev = coarse[i];
        int panels = 1;
        bool converged = false;
        double diff = 0.0;
        for (int r = 0; r < options.max_refinements; ++r) {
            panels *= 2;
            const double next = composite(fn, rule, pts[i], pts[i + 1], panels, result.evaluations);
            if (!std::isfinite(next)) {
                throw NumericalError("layer_quadrature: non-finite integrand on [" + std::to_string(pts[i]) +
                                     ", " + std::to_string(pts[i + 1]) + "]");
            }
            diff = std::abs(next - prev);
            prev = next;
            // rounding in the panel sums sets a floor below which refining is pointless
            const double noise = 8.0 * std::numeric_limits<double>::epsilon() * magnitude[i] *
                                 std::sqrt(static_cast<double>(panels * rule.order()));
            if (diff <= std::max({abs_share, options.rel_tol * magnitude[i], noise})) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericalError("layer_quadrature: no convergence on [" + std::to_string(pts[i]) + ", " +
                                 std::to_string(pts[i + 1]) + "] after " +
                                 std::to_string(options.max_refinements) + " refinements (last change " +
                                 std::to_string(diff) + ")");
        }
        value += prev;
        result.error_estimate += diff;
    }
    result.value = value;
    return result;
}

}  // namespace efeo
