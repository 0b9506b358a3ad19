#include <gtest/gtest.h>

#include <cmath>

#include "efeo/optim.hpp"

using namespace efeo;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * x[i] * a - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}

}  // namespace

TEST(Lbfgs, MinimizesRosenbrock) {
    LbfgsOptions o;
    o.learning_rate = 1.0;
    o.max_iterations = 500;
    o.max_evaluations = 1000;
    Lbfgs opt(o);
    std::vector<double> x{-1.2, 1.0, -0.5, 0.8};
    const StepReport r = opt.step(rosenbrock, x);
    EXPECT_LT(r.final_loss, 1e-12);
    for (double v : x) EXPECT_NEAR(v, 1.0, 1e-5);
    EXPECT_LE(r.evaluations, 1000);
}

TEST(Lbfgs, LossNeverIncreasesAcrossSteps) {
    LbfgsOptions o;
    o.learning_rate = 1.0;
    o.max_iterations = 3;
    Lbfgs opt(o);
    std::vector<double> x{-1.2, 1.0, 0.3};
    double last = INFINITY;
    for (int s = 0; s < 30; ++s) {
        const StepReport r = opt.step(rosenbrock, x);
        EXPECT_LE(r.final_loss, r.initial_loss);
        EXPECT_LE(r.initial_loss, last);
        last = r.final_loss;
    }
    EXPECT_GT(opt.history_length(), 0u);
}

TEST(Lbfgs, QuadraticInverseHessian) {
    // f = 0.5 x^T diag(d) x: after convergence the memory approximates diag(1/d)
    const std::vector<double> d{1.0, 4.0, 9.0};
    const Objective f = [&](std::span<const double> x, std::span<double> g) {
        double v = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            g[i] = d[i] * x[i];
            v += 0.5 * d[i] * x[i] * x[i];
        }
        return v;
    };
    LbfgsOptions o;
    o.learning_rate = 1.0;
    Lbfgs opt(o);
    std::vector<double> x{1.0, 1.0, 1.0};
    EXPECT_LT(opt.step(f, x).final_loss, 1e-14);
    for (double v : x) EXPECT_NEAR(v, 0.0, 1e-7);
    const std::vector<double> h = opt.apply_inverse_hessian(std::vector<double>{1.0, 4.0, 9.0});
    for (double v : h) EXPECT_NEAR(v, 1.0, 5e-2);
}

TEST(StrongWolfe, AcceptedStepSatisfiesConditions) {
    const Objective f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 4 * x[0] * x[0] * x[0] - 3;
        return x[0] * x[0] * x[0] * x[0] - 3 * x[0];
    };
    std::vector<double> x{0.0}, g0(1);
    const double f0 = f(x, g0);
    const std::vector<double> d{-g0[0]};
    const LineSearchResult r = strong_wolfe(f, x, f0, g0, d, 1.0, 1e-4, 0.9);
    ASSERT_TRUE(r.success);
    const double gtd0 = g0[0] * d[0];
    EXPECT_LE(r.value, f0 + 1e-4 * r.step * gtd0);
    EXPECT_LE(std::abs(r.grad[0] * d[0]), 0.9 * std::abs(gtd0));
}

TEST(Adam, DecreasesAQuadratic) {
    AdamOptions o;
    o.learning_rate = 0.05;
    o.max_iterations = 2000;
    Adam opt(o);
    std::vector<double> x{3.0, -2.0};
    const StepReport r = opt.step(
        [](std::span<const double> x, std::span<double> g) {
            g[0] = 2 * x[0];
            g[1] = 20 * x[1];
            return x[0] * x[0] + 10 * x[1] * x[1];
        },
        x);
    EXPECT_LT(r.final_loss, 1e-6);
}
