#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "../test_support.hpp"
#include "efeo/error.hpp"
#include "efeo/evaluation.hpp"
#include "efeo/solvers.hpp"

using namespace efeo;

TEST(DenseSolve, SmallSystems) {
    DenseMatrix a(2, 2);
    a << 2, 1, 1, 3;
    Vector f(2);
    f << 3, 5;
    const Vector x = solve_direct(a, f);
    EXPECT_NEAR(x[0], 0.8, 1e-15);
    EXPECT_NEAR(x[1], 1.4, 1e-15);
    const DenseMatrix id = DenseMatrix::Identity(4, 4);
    const Vector g = Vector::LinSpaced(4, -1.0, 2.0);
    EXPECT_EQ(solve_direct(id, g), g);
}

TEST(DenseSolve, SingularMatrixThrows) {
    DenseMatrix a(3, 3);
    a << 1, 2, 3, 2, 4, 6, 0, 0, 1;
    EXPECT_THROW(DenseLu{a}, NumericalError);
}

TEST(TridiagonalLu, MatchesDenseSolve) {
    for (int n : {1, 2, 3, 17}) {
        std::vector<double> lo(n > 0 ? n - 1 : 0), d(n), up(n > 0 ? n - 1 : 0), rhs(n);
        DenseMatrix a = DenseMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            d[i] = 0.1 + 0.01 * i;  // weak diagonal forces pivoting
            a(i, i) = d[i];
            rhs[i] = std::cos(i + 0.5);
            if (i + 1 < n) {
                lo[i] = 1.0 + 0.1 * i;
                up[i] = -0.7;
                a(i + 1, i) = lo[i];
                a(i, i + 1) = up[i];
            }
        }
        const std::vector<double> x = TridiagonalLu(lo, d, up).solve(rhs);
        const Vector y = a.fullPivLu().solve(Eigen::Map<const Vector>(rhs.data(), n));
        for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], y[i], 1e-12) << "n " << n;
    }
}

TEST(Oracle, ZeroForcingAndLinearity) {
    const ProblemSpec p = ProblemSpec::interior_layer(1e-4);
    auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(-1, 1, 40)));
    const OracleSolver o(p, s);
    EXPECT_EQ(o.solve(ForcingParams::one_d(0, 0, 1, 1, true)).coefficients.cwiseAbs().maxCoeff(), 0.0);
    const ForcingParams f1 = ForcingParams::one_d(1.2, 0.0, 0.7, 0.0, true);
    const ForcingParams f2 = ForcingParams::one_d(0.0, -0.4, 0.0, 1.3, true);
    const ForcingParams f12 = ForcingParams::one_d(1.2, -0.4, 0.7, 1.3, true);
    const Vector sum = o.solve(f1).coefficients + o.solve(f2).coefficients;
    EXPECT_LE((o.solve(f12).coefficients - sum).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Oracle, ParadigmProblemMatchesExactSolution) {
    for (double eps : {1e-2, 1e-5, 1e-8}) {
        const ProblemSpec p = ProblemSpec::paradigm(eps);
        auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(-1, 1, 32)));
        const Solution u = fem_oracle(p, s, ForcingParams::one_d(0.0, 1.0, 0.0, 0.0));
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = -1.0 + i * 0.005;
            worst = std::max(worst, std::abs(u.value({x, 0.0}) - efeo_test::paradigm_exact(x, eps)));
        }
        EXPECT_LE(worst, 1e-6) << "eps " << eps;
    }
}

TEST(Oracle, Exp1FigureForcingAgreesWithReference) {
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-5);
    auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(0, 1, 100)));
    const ForcingParams f = ForcingParams::one_d(1.81, 0.09, 1.68, -1.78);
    const Solution u = fem_oracle(p, s, f);
    const GridFunction r = shishkin_reference(p, f);
    for (const EvalGrid& g : {uniform_grid(p), graded_grid(p)}) EXPECT_LE(relative_l2_error(u, r, g), 1e-3);
    // residual check of the dense solve
    const OracleSolver o(p, s);
    const Vector load = o.loads()(f);
    const Vector res = o.matrix() * u.coefficients - load;
    EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + load.cwiseAbs().maxCoeff()));
}

TEST(Solution, EvaluationIdentities) {
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-2);
    auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(0, 1, 10)));
    Solution u{Vector::Zero(s->total_dim()), s};
    EXPECT_EQ(u.value({0.37, 0.0}), 0.0);
    u.coefficients[s->corrector_count() + 2] = 1.0;  // hat of node 3
    EXPECT_DOUBLE_EQ(u.value({0.3, 0.0}), 1.0);
    u.coefficients.setZero();
    u.coefficients[0] = 1.0;
    const Corrector1D c = make_corrector(corrector_kind_for(p), p.x_domain);
    std::vector<Point> pts;
    for (int i = 0; i <= 200; ++i) pts.push_back({i / 200.0, 0.0});
    const std::vector<double> v = evaluate_solution(u, pts);
    for (int i = 0; i <= 200; ++i) EXPECT_NEAR(v[i], c.eval(i / 200.0).value, 1e-15);
    const Point outside{1.5, 0.0};
    EXPECT_THROW(evaluate_solution(u, std::span(&outside, 1)), InvalidArgument);
}

TEST(Reference, ZeroForcingGivesZero) {
    const GridFunction g = shishkin_reference(ProblemSpec::boundary_layer(1e-3), ForcingParams::one_d(0, 0, 0, 0), 256);
    for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Reference, MaxPrincipleAndLayerForConstantForcing) {
    const double eps = 1e-3;
    const ProblemSpec p = ProblemSpec::paradigm(eps);
    const GridFunction g = shishkin_reference(p, ForcingParams::one_d(0.0, 1.0, 0.0, 0.0));
    // 0 <= u <= 2 since u' >= -1 away from the layer and u(1) = 0
    double big = 0.0;
    for (double v : g.values) {
        EXPECT_GE(v, -1e-12);
        EXPECT_LE(v, 2.0 + 1e-12);
        big = std::max(big, v);
    }
    EXPECT_GT(big, 1.9);
    EXPECT_NEAR(g.value({-1.0 + 10 * eps, 0.0}), 2.0 - 10 * eps, 1e-3);  // layer lives at x = -1
    EXPECT_NEAR(g.value({0.0, 0.0}), efeo_test::paradigm_exact(0.0, eps), 1e-6);
}

TEST(Reference, SelfConvergence) {
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-5);
    const ForcingParams f = ForcingParams::one_d(1.81, 0.09, 1.68, -1.78);
    const GridFunction coarse = shishkin_reference(p, f, 4096);
    const GridFunction fine = shishkin_reference(p, f, 8192);
    const EvalGrid grid = graded_grid(p, 2000);
    std::vector<double> a, b;
    for (const Point& x : grid.points) {
        a.push_back(coarse.value(x));
        b.push_back(fine.value(x));
    }
    EXPECT_LE(relative_l2(a, b, grid.weights), 1e-4);
}

TEST(Reference, SquareProblemSelfConvergence) {
    const ProblemSpec p = ProblemSpec::square(1e-3);
    const ForcingParams f = ForcingParams::two_d(1.0, 0.5, 1.1, -0.3, 0.4, 1.7);
    const GridFunction coarse = shishkin_reference(p, f, 128);
    const GridFunction fine = shishkin_reference(p, f, 256);
    const EvalGrid grid = graded_grid(p);
    std::vector<double> a, b;
    for (const Point& x : grid.points) {
        a.push_back(coarse.value(x));
        b.push_back(fine.value(x));
    }
    EXPECT_LE(relative_l2(a, b, grid.weights), 1e-2);
}

TEST(Reference, CacheRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "efeo_ref_cache_test";
    std::filesystem::remove_all(dir);
    const ReferenceCache cache(dir.string());
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-3);
    const ForcingParams f = ForcingParams::one_d(1, 2, 3, 4);
    const std::string k = cache.key(p, 256, f);
    EXPECT_NE(k, cache.key(p, 512, f));
    EXPECT_FALSE(cache.load(k).has_value());
    const GridFunction g = shishkin_reference(p, f, 256);
    cache.store(k, g);
    const auto back = cache.load(k);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->values, g.values);
    EXPECT_EQ(std::vector<double>(back->x.nodes().begin(), back->x.nodes().end()),
              std::vector<double>(g.x.nodes().begin(), g.x.nodes().end()));
    std::filesystem::remove_all(dir);
}
