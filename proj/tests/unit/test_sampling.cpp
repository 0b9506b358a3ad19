#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "efeo/error.hpp"
#include "efeo/sampling.hpp"

using namespace efeo;

TEST(Forcing, EvaluatesTheTrigFamily) {
    const ForcingParams f = ForcingParams::one_d(0.5, 0.09, 1.0, 3.0);
    EXPECT_NEAR(forcing_eval(f, 0.0), 0.09, 1e-15);
    EXPECT_NEAR(forcing_eval(f, 0.7), 0.5 * std::sin(0.7) + 0.09 * std::cos(2.1), 1e-15);
    const ForcingParams c = ForcingParams::one_d(0.5, 0.09, 1.0, 3.0, true);
    EXPECT_EQ(forcing_eval(c, 0.0), 0.0);
    EXPECT_NEAR(forcing_eval(c, -0.4), -0.4 * forcing_eval(f, -0.4), 1e-15);
    const ForcingParams g = ForcingParams::two_d(1.0, 2.0, 0.1, 0.2, 0.3, 0.4);
    EXPECT_NEAR(forcing_eval(g, 0.5, 0.25), std::sin(0.1) + 2.0 * std::cos(0.25), 1e-15);
}

TEST(Forcing, DiscretizationLayout) {
    const ForcingParams g = ForcingParams::two_d(1.0, 0.0, 1.0, 3.0, 0.0, 0.0);
    const std::vector<double> v = discretize_forcing(g, 5, {0.0, 1.0}, {0.0, 1.0});
    ASSERT_EQ(v.size(), 25u);
    // row index is y
    EXPECT_NEAR(v[2 * 5 + 1], std::sin(0.25 + 3.0 * 0.5), 1e-15);
    const std::vector<double> w = discretize_forcing(ForcingParams::one_d(1, 0, 1, 0), 201, {-1.0, 1.0});
    ASSERT_EQ(w.size(), 201u);
    EXPECT_DOUBLE_EQ(w.back(), std::sin(1.0));
}

TEST(Sampling, DeterministicAndIndependentOfOrder) {
    SamplingSpec spec;
    spec.seed = 42;
    const ForcingParams a5 = sample_forcing(spec, ProblemClass::boundary1d, 5);
    sample_forcing(spec, ProblemClass::boundary1d, 0);
    EXPECT_EQ(sample_forcing(spec, ProblemClass::boundary1d, 5), a5);
    EXPECT_NE(sample_forcing(spec, ProblemClass::boundary1d, 6), a5);
    EXPECT_NE(sample_forcing(spec, ProblemClass::boundary1d, 5, "test"), a5);
    spec.seed = 43;
    EXPECT_NE(sample_forcing(spec, ProblemClass::boundary1d, 5), a5);
}

TEST(Sampling, DrawsStayInRange) {
    SamplingSpec spec;
    spec.amplitude = {-1.0, 0.5};
    spec.frequency = {2.0, 3.0};
    for (std::uint64_t i = 0; i < 500; ++i) {
        const ForcingParams f = sample_forcing(spec, ProblemClass::square2d, i);
        EXPECT_EQ(f.dimension, 2);
        for (double m : {f.m0, f.m1}) {
            EXPECT_GE(m, -1.0);
            EXPECT_LT(m, 0.5);
        }
        for (double n : f.n) {
            EXPECT_GE(n, 2.0);
            EXPECT_LT(n, 3.0);
        }
    }
    EXPECT_TRUE(sample_forcing(spec, ProblemClass::interior1d, 0).compat_factor);
    EXPECT_FALSE(sample_forcing(spec, ProblemClass::boundary1d, 0).compat_factor);
}

TEST(Sampling, UniformMomentsLookRight) {
    CounterRng rng(derive_seed(7, "test", 0));
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 5e-3);
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

TEST(Sampling, DerivedSeedsAreDistinct) {
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        keys.insert(derive_seed(0, "train", i));
        keys.insert(derive_seed(0, "test", i));
    }
    EXPECT_EQ(keys.size(), 2000u);
}

TEST(Sampling, SpecValidation) {
    SamplingSpec s;
    s.samples = 0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s.samples = 4;
    s.amplitude = {1.0, -1.0};
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Sampling, ParseForcing) {
    const ForcingParams f = parse_forcing("1,-0.5,2,3", ProblemClass::boundary1d);
    EXPECT_EQ(f, ForcingParams::one_d(1.0, -0.5, 2.0, 3.0));
    EXPECT_TRUE(parse_forcing("1,0,1,0", ProblemClass::interior1d).compat_factor);
    EXPECT_EQ(parse_forcing("1,2,3,4,5,6", ProblemClass::square2d).n[3], 6.0);
    EXPECT_THROW(parse_forcing("1,2,3", ProblemClass::boundary1d), InvalidArgument);
    EXPECT_THROW(parse_forcing("1,2,3,x", ProblemClass::boundary1d), InvalidArgument);
    EXPECT_THROW(parse_forcing("1,2,3,4", ProblemClass::square2d), InvalidArgument);
}
