#pragma once

// Independent oracles shared by the unit and acceptance tests. None of these
// reuse the library's integration or assembly code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace efeo_test {

/// Gauss-Legendre nodes/weights by Golub-Welsch-free Newton iteration,
/// written separately from the library rule so the two can disagree.
inline void gl_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

/// Composite 64-point Gauss-Legendre on a geometric partition refined towards
/// `focus` (pieces shrink by 2 down to `finest`), so layer integrands at any
/// epsilon are resolved.
inline double oracle_integral(const std::function<double(double)>& f, double a, double b, double focus,
                              double finest) {
    static std::vector<double> x, w;
    if (x.empty()) gl_rule(64, x, w);
    std::vector<double> cuts{a, b};
    for (double d = finest; d < (b - a); d *= 2.0) {
        if (focus - d > a && focus - d < b) cuts.push_back(focus - d);
        if (focus + d < b && focus + d > a) cuts.push_back(focus + d);
    }
    if (focus > a && focus < b) cuts.push_back(focus);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double half = 0.5 * (cuts[i + 1] - cuts[i]);
        if (half <= 0.0) continue;
        for (std::size_t q = 0; q < x.size(); ++q) s += half * w[q] * f(mid + half * x[q]);
    }
    return s;
}

/// Exact solution of -eps u'' - u' = 1 on (-1, 1) with u(+-1) = 0.
inline double paradigm_exact(double x, double eps) {
    const double e2 = std::exp(-2.0 / eps);
    return (1.0 - x) - 2.0 * (std::exp(-(x + 1.0) / eps) - e2) / (1.0 - e2);
}

}  // namespace efeo_test
