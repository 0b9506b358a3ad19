#include <gtest/gtest.h>

#include <cmath>

#include "efeo/error.hpp"
#include "efeo/network.hpp"
#include "efeo/sampling.hpp"

using namespace efeo;

namespace {

NetworkConfig mlp(int in, std::vector<int> hidden, int out) {
    NetworkConfig c;
    c.input_dim = in;
    c.hidden = std::move(hidden);
    c.output_dim = out;
    return c;
}

NetworkConfig conv(Architecture a, int spatial, std::vector<int> hidden, int out) {
    NetworkConfig c;
    c.architecture = a;
    c.spatial = spatial;
    c.input_dim = a == Architecture::conv1d ? spatial : spatial * spatial;
    c.hidden = std::move(hidden);
    c.output_dim = out;
    c.kernel = 3;
    c.stride = 2;
    c.padding = 1;
    return c;
}

Batch random_batch(int rows, int cols, std::uint64_t seed) {
    CounterRng rng(seed);
    Batch b(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) b(i, j) = rng.uniform(-1.0, 1.0);
    return b;
}

// d/dp of 0.5 * sum(w .* net(x)) with fixed weights w
void check_gradient(const NetworkConfig& cfg) {
    const Network net(cfg);
    std::vector<double> p = net.init(3).values;
    CounterRng rng(11);
    for (double& v : p) v += rng.uniform(-0.1, 0.1);  // nonzero biases
    const Batch x = random_batch(cfg.input_dim, 3, 5);
    const Batch w = random_batch(cfg.output_dim, 3, 6);
    const auto loss = [&](std::span<const double> q) { return 0.5 * (net.forward(q, x).array() * w.array()).sum(); };
    std::vector<double> g(p.size(), 0.0);
    net.backward(p, net.forward_tape(p, x), 0.5 * w, g);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    for (std::size_t k = 0; k < p.size(); k += std::max<std::size_t>(1, p.size() / 40)) {
        const double h = 1e-6;
        std::vector<double> a = p, b = p;
        a[k] += h;
        b[k] -= h;
        const double fd = (loss(a) - loss(b)) / (2 * h);
        EXPECT_NEAR(g[k], fd, 1e-6 * std::max(std::abs(fd), 1e-2 * gmax)) << cfg.describe() << " k " << k;
    }
}

}  // namespace

TEST(Swish, Values) {
    EXPECT_EQ(swish(0.0), 0.0);
    EXPECT_NEAR(swish(1.0), 0.731059, 1e-6);
    EXPECT_NEAR(swish_derivative(0.0), 0.5, 1e-15);
    for (double x : {-3.0, -0.2, 0.7, 4.0}) {
        EXPECT_NEAR(swish_derivative(x), (swish(x + 1e-6) - swish(x - 1e-6)) / 2e-6, 1e-8);
    }
}

TEST(NetworkConfig, ParameterCounts) {
    EXPECT_EQ(mlp(4, {8}, 3).parameter_count(), 67u);
    EXPECT_EQ(Network(mlp(201, {64, 64}, 100)).parameter_count(), 201u * 64 + 64 + 64 * 64 + 64 + 64 * 100 + 100);
    const NetworkConfig c = conv(Architecture::conv1d, 16, {4, 2}, 5);
    // 16 -> 8 -> 4 positions
    EXPECT_EQ(c.parameter_count(), (4u * 3 + 4) + (2u * 4 * 3 + 2) + (2u * 4 * 5 + 5));
    EXPECT_EQ(Network(c).parameter_count(), c.parameter_count());
    EXPECT_EQ(mlp(201, {64, 64}, 100).describe(), "mlp[201-64-64-100]");
    EXPECT_THROW(mlp(0, {}, 3).validate(), InvalidArgument);
    NetworkConfig bad = conv(Architecture::conv2d, 8, {2}, 3);
    bad.input_dim = 8;
    EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Network, InitIsDeterministicAndBounded) {
    const Network net(mlp(10, {20}, 5));
    const NetworkParameters a = net.init(9);
    EXPECT_EQ(a.values, net.init(9).values);
    EXPECT_NE(a.values, net.init(10).values);
    const double bound = std::sqrt(6.0 / 30.0);
    for (std::size_t k = 0; k < 200; ++k) EXPECT_LE(std::abs(a.values[k]), bound);
    for (std::size_t k = 200; k < 220; ++k) EXPECT_EQ(a.values[k], 0.0);  // first-layer biases
}

TEST(Network, ForwardSpecialCases) {
    const Network net(mlp(6, {7, 3}, 4));
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1, 1);
    std::vector<double> zero(net.parameter_count(), 0.0);
    EXPECT_EQ(net.forward(zero, x), Eigen::VectorXd::Zero(4));
    // biases only: output equals last bias
    std::vector<double> p = zero;
    for (int i = 0; i < 4; ++i) p[p.size() - 4 + i] = i + 0.5;
    EXPECT_EQ(net.forward(p, x), Eigen::VectorXd::LinSpaced(4, 0.5, 3.5));

    const Network lin(mlp(3, {}, 3));
    std::vector<double> id(12, 0.0);
    id[0] = id[4] = id[8] = 1.0;
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(3, 2, 4);
    EXPECT_EQ(lin.forward(id, y), y);
}

TEST(Network, BatchForwardMatchesColumns) {
    const Network net(conv(Architecture::conv2d, 9, {3, 2}, 4));
    const std::vector<double> p = net.init(1).values;
    const Batch x = random_batch(81, 4, 2);
    const Batch y = net.forward(p, x);
    for (int j = 0; j < 4; ++j) {
        const Eigen::VectorXd c = net.forward(p, Eigen::VectorXd(x.col(j)));
        EXPECT_LE((c - y.col(j)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Network, GradientsMatchFiniteDifferences) {
    check_gradient(mlp(5, {6, 4}, 3));
    check_gradient(conv(Architecture::conv1d, 12, {3, 2}, 4));
    check_gradient(conv(Architecture::conv2d, 7, {2, 3}, 3));
}
