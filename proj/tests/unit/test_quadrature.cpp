#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "efeo/error.hpp"
#include "efeo/quadrature.hpp"

using namespace efeo;

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
    for (int n : {1, 2, 5, 10, 32, 64}) {
        const GaussRule& r = gauss_legendre(n);
        for (int deg = 0; deg <= 2 * n - 1; deg += std::max(1, n / 3)) {
            const double got = integrate(r, 0.0, 1.0, [deg](double x) { return std::pow(x, deg); });
            EXPECT_NEAR(got, 1.0 / (deg + 1), 1e-14) << "n " << n << " deg " << deg;
        }
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        EXPECT_NEAR(wsum, 2.0, 1e-14);
    }
    EXPECT_THROW(gauss_legendre(0), InvalidArgument);
}

TEST(LayerQuadrature, ResolvesSharpExponential) {
    for (double eps : {1e-2, 1e-5, 1e-8}) {
        const double layer = 1.0;
        const QuadratureResult r =
            layer_quadrature([eps](double x) { return std::exp(-(1.0 - x) / eps); }, 0.0, 1.0,
                             std::span(&layer, 1), eps);
        const double exact = eps * (1.0 - std::exp(-1.0 / eps));
        EXPECT_NEAR(r.value, exact, 1e-12) << "eps " << eps;
    }
}

TEST(LayerQuadrature, ResolvesInteriorErfProduct) {
    const double eps = 1e-6;
    const double s = 1.0 / std::sqrt(2.0 * eps);
    const double layer = 0.0;
    const auto f = [s](double x) { return std::erf(s * x) * std::erf(s * x); };
    const QuadratureResult r = layer_quadrature(f, -1.0, 1.0, std::span(&layer, 1), 1.0 / s);
    // 1 - erf^2 decays like Gaussian tails: int (1 - erf(sx)^2) over R = 2 sqrt(2) / (s sqrt(pi))
    const double deficit = 2.0 * std::sqrt(2.0) / (s * std::sqrt(std::acos(-1.0)));
    EXPECT_NEAR(r.value, 2.0 - deficit, 1e-11);
}

TEST(LayerQuadrature, NonConvergenceThrows) {
    LayerQuadratureOptions opt;
    opt.max_refinements = 1;
    opt.abs_tol = 1e-300;
    opt.rel_tol = 0.0;
    EXPECT_THROW(layer_quadrature([](double x) { return std::sin(1e4 * x); }, 0.0, 1.0, {}, 1.0, opt),
                 NumericalError);
}

TEST(LayerBreakpoints, GradedAroundLayer) {
    const double p = 0.5;
    const std::vector<double> b = layer_breakpoints(0.0, 1.0, std::span(&p, 1), 0.01);
    EXPECT_DOUBLE_EQ(b.front(), 0.0);
    EXPECT_DOUBLE_EQ(b.back(), 1.0);
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
    const auto near = [&](double v) {
        return std::any_of(b.begin(), b.end(), [v](double t) { return std::abs(t - v) < 1e-15; });
    };
    EXPECT_TRUE(near(0.5));
    EXPECT_TRUE(near(0.51));
    EXPECT_TRUE(near(0.46));
}
