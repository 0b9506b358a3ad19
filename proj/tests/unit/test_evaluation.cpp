#include <gtest/gtest.h>

#include <cmath>

#include "../test_support.hpp"
#include "efeo/error.hpp"
#include "efeo/evaluation.hpp"

using namespace efeo;

TEST(RelativeL2, HandValues) {
    const std::vector<double> u{1.0, -2.0, 0.5}, w{1.0, 1.0, 1.0};
    EXPECT_EQ(relative_l2(u, u, w), 0.0);
    const std::vector<double> twice{2.0, -4.0, 1.0};
    EXPECT_NEAR(relative_l2(twice, u, w), 1.0, 1e-15);
    const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0}, one{1.0, 1.0};
    EXPECT_NEAR(relative_l2(a, b, one), std::sqrt(2.0), 1e-15);
    const std::vector<double> z{0.0, 0.0};
    EXPECT_THROW(relative_l2(a, z, one), InvalidArgument);
}

TEST(RelativeL2, ScaleInvariant) {
    const std::vector<double> p{0.3, 1.1, -0.7, 2.0}, r{0.2, 1.0, -0.9, 2.2}, w{0.1, 0.4, 0.3, 0.2};
    for (double c : {-3.0, 1e-7, 1e6}) {
        std::vector<double> cp, cr;
        for (std::size_t i = 0; i < p.size(); ++i) {
            cp.push_back(c * p[i]);
            cr.push_back(c * r[i]);
        }
        EXPECT_NEAR(relative_l2(cp, cr, w), relative_l2(p, r, w), 1e-14);
    }
}

TEST(Grids, SizesAndWeights) {
    const ProblemSpec p = ProblemSpec::interior_layer(1e-4);
    const EvalGrid u = uniform_grid(p);
    ASSERT_EQ(u.points.size(), 201u);
    double sum = 0.0;
    for (double w : u.weights) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14);
    const EvalGrid g = graded_grid(p);
    EXPECT_EQ(g.points.size(), 401u);
    const EvalGrid s = graded_grid(ProblemSpec::square(1e-3));
    EXPECT_EQ(s.points.size(), 101u * 101u);
    sum = 0.0;
    for (double w : s.weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-13);
    EXPECT_EQ(uniform_grid(ProblemSpec::square(1e-3)).points.size(), 51u * 51u);
}

TEST(H1Error, ExactInterpolantOfLinearFunction) {
    // P1 reference of a piecewise linear function equals it: error reduces to the approximation error
    const ProblemSpec p = ProblemSpec::paradigm(1e-3);
    auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(-1, 1, 8)));
    Solution u{Vector::Zero(s->total_dim()), s};
    const GridFunction zero{build_uniform_mesh_1d(-1, 1, 16), std::nullopt, std::vector<double>(17, 0.0)};
    u.coefficients[s->corrector_count() + 3] = 1.0;  // hat of node 4 at x = 0, width 0.25
    // |hat|^2_H1 = 2 / 0.25, |hat|^2_L2 = 2 * 0.25 / 3
    EXPECT_NEAR(h1_error_1d(u, zero), std::sqrt(8.0 + 0.5 / 3.0), 1e-13);
}

TEST(H1Error, ExactlyRepresentedSolutionLeavesOnlyReferenceError) {
    const double eps = 1e-4;
    const ProblemSpec p = ProblemSpec::paradigm(eps);
    const GridFunction ref = shishkin_reference(p, ForcingParams::one_d(0.0, 1.0, 0.0, 0.0), 1 << 16);
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
        auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(-1, 1, n)));
        const double e = h1_error_1d(fem_oracle(p, s, ForcingParams::one_d(0.0, 1.0, 0.0, 0.0)), ref);
        // f = 1 is represented exactly, so only the reference error remains
        EXPECT_LE(e / h1_norm_1d(ref), 1e-3) << "n " << n;
        prev = e;
    }
    EXPECT_GT(prev, 0.0);
}

TEST(Experiment, OracleBeatsPlainAndIsDeterministic) {
    ExperimentSpec spec;
    spec.problem_name = "boundary1d";
    spec.epsilon = 1e-5;
    spec.mesh_n = 50;
    spec.n_test = 6;
    spec.n_ref = 2048;
    const auto oracle = run_experiment(spec);
    ASSERT_EQ(oracle.size(), 2u);
    EXPECT_EQ(oracle[0].grid, GridKind::uniform);
    EXPECT_EQ(oracle[1].grid, GridKind::graded);
    spec.mode = SolverMode::plain;
    const auto plain = run_experiment(spec);
    for (int g = 0; g < 2; ++g) {
        EXPECT_LT(oracle[g].mean, 1e-2 * plain[g].mean);
        EXPECT_EQ(oracle[g].per_sample.size(), 6u);
    }
    EXPECT_EQ(reports_to_csv(plain, false), reports_to_csv(run_experiment(spec), false));
}

TEST(Experiment, TrainedErrorIsNeverBelowOracle) {
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-3);
    auto s = std::make_shared<const EnrichedSpace>(build_enriched_space(p, build_uniform_mesh_1d(0, 1, 20)));
    const OracleSolver oracle(p, s);
    NetworkConfig c;
    c.input_dim = 51;
    c.hidden = {16};
    c.output_dim = static_cast<int>(s->total_dim());
    TrainConfig t;
    t.samples = 16;
    t.steps = 3;
    t.max_iterations = 20;
    t.resolution = 51;
    const TrainResult r = train(p, oracle, c, t);

    ExperimentSpec spec;
    spec.problem_name = "boundary1d";
    spec.epsilon = 1e-3;
    spec.mesh_n = 20;
    spec.n_test = 8;
    spec.n_ref = 2048;
    spec.grids = {GridKind::uniform};
    const auto base = run_experiment(spec);
    spec.mode = SolverMode::trained;
    spec.model = std::make_shared<const CoefficientModel>(r.params, InputEncoding::forcing_values, 51, p);
    spec.train_samples = 16;
    const auto trained = run_experiment(spec);
    for (int i = 0; i < 8; ++i) EXPECT_GE(trained[0].per_sample[i], base[0].per_sample[i] - 1e-12) << i;
    EXPECT_EQ(trained[0].samples, 16);
}

TEST(Experiment, TestForcingsAreDisjointFromTraining) {
    const ProblemSpec p = ProblemSpec::boundary_layer(1e-3);
    const auto test = test_forcings(p, SamplingSpec{}, 0, 50);
    for (int i = 0; i < 50; ++i) EXPECT_NE(test[i], sample_forcing(SamplingSpec{}, p.cls, i, "train"));
    EXPECT_EQ(test, test_forcings(p, SamplingSpec{}, 0, 50));
}

TEST(Report, CsvLayout) {
    ErrorReport r;
    r.problem_name = "boundary1d";
    r.epsilon = 1e-5;
    r.mesh_n = 100;
    r.mean = 1.5e-4;
    r.std = 2e-5;
    r.n_test = 100;
    r.seconds = 1.25;
    const std::string with = reports_to_csv({r});
    EXPECT_EQ(with.substr(0, with.find('\n')),
              "problem,epsilon,mode,mesh_n,M,grid,rel_l2_mean,rel_l2_std,n_test,seconds");
    EXPECT_NE(with.find(",1.250\n"), std::string::npos) << with;
    EXPECT_NE(reports_to_csv({r}, false).find(",-\n"), std::string::npos);
    EXPECT_EQ(solver_mode_from_string("plain"), SolverMode::plain);
    EXPECT_THROW(grid_kind_from_string("random"), InvalidArgument);
}
