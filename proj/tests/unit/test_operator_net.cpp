#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "efeo/error.hpp"
#include "efeo/operator_net.hpp"
#include "efeo/optim.hpp"

using namespace efeo;

namespace {

struct Fixture {
    ProblemSpec problem = ProblemSpec::boundary_layer(1e-2);
    std::shared_ptr<const EnrichedSpace> space =
        std::make_shared<const EnrichedSpace>(build_enriched_space(problem, build_uniform_mesh_1d(0, 1, 12)));
    OracleSolver oracle{problem, space};

    std::vector<ForcingParams> forcings(int m, std::uint64_t seed = 0) const {
        SamplingSpec s;
        s.seed = seed;
        std::vector<ForcingParams> out;
        for (int i = 0; i < m; ++i) out.push_back(sample_forcing(s, problem.cls, i));
        return out;
    }
};

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(ResidualLoss, ZeroNetworkGivesMeanLoadNorm) {
    Fixture fx;
    const ResidualBatch b = make_batch(fx.problem, fx.oracle.loads(), fx.forcings(5), InputEncoding::forcing_values, 21);
    NetworkConfig c;
    c.input_dim = 21;
    c.hidden = {6};
    c.output_dim = static_cast<int>(fx.space->total_dim());
    const Network net(c);
    const std::vector<double> zero(net.parameter_count(), 0.0);
    const double expect = b.loads.colwise().squaredNorm().sum() / 5.0;
    EXPECT_NEAR(residual_loss(net, zero, fx.oracle.matrix(), b), expect, 1e-15 * expect);
}

TEST(ResidualLoss, OracleCoefficientsCollapseTheLoss) {
    Fixture fx;
    const auto fs = fx.forcings(4);
    Eigen::MatrixXd coeffs(fx.space->total_dim(), 4), loads(fx.space->total_dim(), 4);
    for (int m = 0; m < 4; ++m) {
        coeffs.col(m) = fx.oracle.solve(fs[m]).coefficients;
        loads.col(m) = fx.oracle.loads()(fs[m]);
    }
    EXPECT_LE(residual_loss_of_coefficients(fx.oracle.matrix(), coeffs, loads), 1e-18);
}

TEST(ResidualLoss, GradientMatchesFiniteDifferences) {
    Fixture fx;
    const ResidualBatch b = make_batch(fx.problem, fx.oracle.loads(), fx.forcings(3), InputEncoding::load_vector, 0);
    NetworkConfig c;
    c.input_dim = static_cast<int>(fx.space->total_dim());
    c.hidden = {8};
    c.output_dim = c.input_dim;
    const Network net(c);
    std::vector<double> p = net.init(4).values;
    const LossAndGrad lg = residual_loss_and_grad(net, p, fx.oracle.matrix(), b);
    EXPECT_NEAR(lg.loss, residual_loss(net, p, fx.oracle.matrix(), b), 1e-14 * lg.loss);
    CounterRng rng(1);
    for (int t = 0; t < 20; ++t) {
        const std::size_t k = rng.next_u64() % p.size();
        std::vector<double> a = p, q = p;
        a[k] += 1e-6;
        q[k] -= 1e-6;
        const double fd = (residual_loss(net, a, fx.oracle.matrix(), b) - residual_loss(net, q, fx.oracle.matrix(), b)) / 2e-6;
        EXPECT_NEAR(lg.grad[k], fd, 1e-5 * std::max(std::abs(fd), 1e-6)) << "k " << k;
    }
}

TEST(ResidualLoss, NonFiniteResidualNamesTheSample) {
    Fixture fx;
    ResidualBatch b = make_batch(fx.problem, fx.oracle.loads(), fx.forcings(3), InputEncoding::load_vector, 0);
    b.loads(2, 1) = NAN;
    NetworkConfig c;
    c.input_dim = c.output_dim = static_cast<int>(fx.space->total_dim());
    const Network net(c);
    try {
        residual_loss_and_grad(net, net.init(0).values, fx.oracle.matrix(), b);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("sample 1"), std::string::npos) << e.what();
    }
}

TEST(Train, LinearLayerOnOneSampleReachesZeroLoss) {
    // linear least squares: the minimum is zero and L-BFGS gets there quickly
    Fixture fx;
    NetworkConfig c;
    c.input_dim = 21;
    c.output_dim = static_cast<int>(fx.space->total_dim());
    const Network net(c);
    const ResidualBatch b = make_batch(fx.problem, fx.oracle.loads(), fx.forcings(1), InputEncoding::forcing_values, 21);
    LbfgsOptions o;
    o.learning_rate = 1.0;
    o.max_iterations = 50;
    o.max_evaluations = 1000;
    Lbfgs opt(o);
    std::vector<double> p = net.init(0).values;
    const StepReport r = opt.step(
        [&](std::span<const double> x, std::span<double> g) {
            LossAndGrad lg = residual_loss_and_grad(net, x, fx.oracle.matrix(), b);
            std::copy(lg.grad.begin(), lg.grad.end(), g.begin());
            return lg.loss;
        },
        p);
    EXPECT_LE(r.iterations, 50);
    EXPECT_LE(r.final_loss, 1e-12);

    // the same problem through train(), which caps evaluations at 5/4 of the iterations
    TrainConfig t;
    t.samples = 1;
    t.steps = 2;
    t.learning_rate = 1.0;
    t.max_iterations = 50;
    t.mode = SamplingMode::fixed;
    t.resolution = 21;
    const TrainResult tr = train(fx.problem, fx.oracle, c, t);
    ASSERT_EQ(tr.history.size(), 2u);
    EXPECT_LE(tr.history.back().loss, 1e-12);
}

TEST(Train, DeterministicHistory) {
    Fixture fx;
    NetworkConfig c;
    c.input_dim = 21;
    c.hidden = {10};
    c.output_dim = static_cast<int>(fx.space->total_dim());
    TrainConfig t;
    t.samples = 8;
    t.steps = 4;
    t.max_iterations = 5;
    t.resolution = 21;
    const TrainResult a = train(fx.problem, fx.oracle, c, t);
    const TrainResult b = train(fx.problem, fx.oracle, c, t);
    EXPECT_EQ(a.params.values, b.params.values);
    ASSERT_EQ(a.history.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.history[i].loss, b.history[i].loss);
    EXPECT_LT(a.history.back().loss, a.history.front().loss);
}

TEST(Train, ConfigValidation) {
    TrainConfig t;
    t.steps = 0;
    EXPECT_THROW(t.validate(), InvalidArgument);
    t = TrainConfig{};
    t.learning_rate = -1;
    EXPECT_THROW(t.validate(), InvalidArgument);
}

TEST(Checkpoint, RoundTripIsBitwise) {
    NetworkConfig c;
    c.input_dim = 7;
    c.hidden = {5, 4};
    c.output_dim = 3;
    const Network net(c);
    const NetworkParameters p = net.init(21);
    const auto path = tmp("efeo_ckpt_test.efeo");
    save_checkpoint(p, path.string(), {{"problem", "boundary1d"}});
    const Checkpoint back = load_checkpoint(path.string(), c);
    EXPECT_EQ(back.params.config, c);
    EXPECT_EQ(back.metadata.at("problem"), "boundary1d");
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(7, -1, 1);
    EXPECT_EQ(net.forward(back.params.values, x), net.forward(p.values, x));
    for (std::size_t k = 0; k < p.values.size(); ++k)
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.params.values[k]), std::bit_cast<std::uint64_t>(p.values[k]));

    NetworkConfig other = c;
    other.hidden = {5, 5};
    try {
        load_checkpoint(path.string(), other);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(c.describe()), std::string::npos) << msg;
        EXPECT_NE(msg.find(other.describe()), std::string::npos) << msg;
    }
    std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
    NetworkConfig c;
    c.input_dim = 3;
    c.output_dim = 2;
    const auto path = tmp("efeo_ckpt_bad.efeo");
    save_checkpoint(Network(c).init(0), path.string());
    std::string bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    {
        std::ofstream out(path, std::ios::binary);
        out << "XXXX" << bytes.substr(4);
    }
    EXPECT_THROW(load_checkpoint(path.string()), IoError);
    {
        std::ofstream out(path, std::ios::binary);
        out << bytes.substr(0, bytes.size() - 5);
    }
    EXPECT_THROW(load_checkpoint(path.string()), IoError);
    EXPECT_THROW(load_checkpoint((path.string() + ".missing")), IoError);
    std::filesystem::remove(path);
}

TEST(Encoding, InputWidths) {
    const ProblemSpec p = ProblemSpec::square(1e-3);
    EXPECT_EQ(input_dim_for(p, 2601, InputEncoding::forcing_values, 51), 2601);
    EXPECT_EQ(input_dim_for(p, 2601, InputEncoding::load_vector, 51), 2601);
    EXPECT_EQ(input_dim_for(ProblemSpec::boundary_layer(1e-3), 100, InputEncoding::forcing_values, 201), 201);
    EXPECT_EQ(encoding_from_string("load"), InputEncoding::load_vector);
    EXPECT_THROW(encoding_from_string("pixels"), InvalidArgument);
}
