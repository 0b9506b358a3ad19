#include "efeo/network.hpp"

#include <cmath>
#include <sstream>

#include "efeo/error.hpp"
#include "efeo/sampling.hpp"

namespace efeo {

double swish(double x) { return x / (1.0 + std::exp(-x)); }

double swish_derivative(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

namespace {

int conv_out(int n, int kernel, int stride, int padding) { return (n + 2 * padding - kernel) / stride + 1; }

}  // namespace

void NetworkConfig::validate() const {
    EFEO_REQUIRE(input_dim >= 1 && output_dim >= 1, "network: input and output dimensions must be positive");
    for (int h : hidden) EFEO_REQUIRE(h >= 1, "network: hidden widths must be positive");
    if (architecture == Architecture::mlp) return;
    EFEO_REQUIRE(!hidden.empty(), "network: convolutional networks need at least one conv layer");
    EFEO_REQUIRE(kernel >= 1 && stride >= 1 && padding >= 0, "network: invalid kernel/stride/padding");
    EFEO_REQUIRE(spatial >= 1, "network: conv networks need a spatial size");
    const long expect = architecture == Architecture::conv1d ? spatial : static_cast<long>(spatial) * spatial;
    EFEO_REQUIRE(expect == input_dim, "network: input_dim does not match the spatial size");
    int n = spatial;
    for (std::size_t l = 0; l < hidden.size(); ++l) {
        n = conv_out(n, kernel, stride, padding);
        EFEO_REQUIRE(n >= 1, "network: convolution stack shrinks the input to nothing");
    }
}

std::size_t NetworkConfig::parameter_count() const {
    validate();
    std::size_t count = 0;
    if (architecture == Architecture::mlp) {
        int prev = input_dim;
        for (int h : hidden) {
            count += static_cast<std::size_t>(prev) * h + h;
            prev = h;
        }
        return count + static_cast<std::size_t>(prev) * output_dim + output_dim;
    }
    const int taps = architecture == Architecture::conv1d ? kernel : kernel * kernel;
    int channels = 1;
    int n = spatial;
    for (int h : hidden) {
        count += static_cast<std::size_t>(h) * channels * taps + h;
        channels = h;
        n = conv_out(n, kernel, stride, padding);
    }
    const std::size_t flat =
        static_cast<std::size_t>(channels) * n * (architecture == Architecture::conv2d ? n : 1);
    return count + flat * output_dim + output_dim;
}

std::string NetworkConfig::describe() const {
    std::ostringstream s;
    s << (architecture == Architecture::mlp ? "mlp" : architecture == Architecture::conv1d ? "conv1d" : "conv2d")
      << '[' << input_dim;
    for (int h : hidden) s << '-' << h;
    s << '-' << output_dim << ']';
    return s.str();
}

// ---------------------------------------------------------------------------
// Layers

class Layer {
public:
    virtual ~Layer() = default;
    virtual std::size_t parameter_count() const = 0;
    virtual Batch forward(const double* params, const Batch& x) const = 0;
    /// Adds the parameter gradient into grad and returns d(loss)/d(input).
    virtual Batch backward(const double* params, const Batch& x, const Batch& y, const Batch& gy,
                           double* grad) const = 0;
    /// Glorot bounds; zero when the layer has no weights.
    virtual void init(double* params, CounterRng& rng) const = 0;
};

namespace {

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using Map = Eigen::Map<Eigen::MatrixXd>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

void glorot(double* w, std::size_t n, int fan_in, int fan_out, CounterRng& rng) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-bound, bound);
}

class Dense final : public Layer {
public:
    Dense(int in, int out) : in_(in), out_(out) {}
    std::size_t parameter_count() const override { return static_cast<std::size_t>(in_) * out_ + out_; }

    Batch forward(const double* p, const Batch& x) const override {
        ConstMap w(p, out_, in_);
        ConstVec b(p + static_cast<std::size_t>(in_) * out_, out_);
        Batch y = w * x;
        y.colwise() += b;
        return y;
    }

    Batch backward(const double* p, const Batch& x, const Batch&, const Batch& gy, double* g) const override {
        Map gw(g, out_, in_);
        VecMap gb(g + static_cast<std::size_t>(in_) * out_, out_);
        gw.noalias() += gy * x.transpose();
        gb += gy.rowwise().sum();
        return ConstMap(p, out_, in_).transpose() * gy;
    }

    void init(double* p, CounterRng& rng) const override {
        glorot(p, static_cast<std::size_t>(in_) * out_, in_, out_, rng);
        for (int i = 0; i < out_; ++i) p[static_cast<std::size_t>(in_) * out_ + i] = 0.0;
    }

private:
    int in_, out_;
};

class Swish final : public Layer {
public:
    std::size_t parameter_count() const override { return 0; }
    Batch forward(const double*, const Batch& x) const override {
        return x.unaryExpr([](double v) { return swish(v); });
    }
    Batch backward(const double*, const Batch& x, const Batch&, const Batch& gy, double*) const override {
        return gy.cwiseProduct(x.unaryExpr([](double v) { return swish_derivative(v); }));
    }
    void init(double*, CounterRng&) const override {}
};

/// Strided convolution over `dims` spatial axes (1 or 2) of equal size n.
/// Sample layout: channel-major, then row-major over space.
class Conv final : public Layer {
public:
    Conv(int dims, int in_ch, int out_ch, int n, int kernel, int stride, int padding)
        : dims_(dims), in_(in_ch), out_(out_ch), n_(n), k_(kernel), s_(stride), p_(padding),
          m_(conv_out(n, kernel, stride, padding)) {}

    std::size_t parameter_count() const override { return static_cast<std::size_t>(out_) * rows() + out_; }

    Batch forward(const double* p, const Batch& x) const override {
        const Eigen::MatrixXd cols = im2col(x);
        ConstMap w(p, out_, rows());
        ConstVec b(p + static_cast<std::size_t>(out_) * rows(), out_);
        Eigen::MatrixXd y = w * cols;  // out_ x (positions * batch)
        y.colwise() += b;
        return to_batch(y, x.cols());
    }

    Batch backward(const double* p, const Batch& x, const Batch&, const Batch& gy, double* g) const override {
        const Eigen::MatrixXd cols = im2col(x);
        const Eigen::MatrixXd gmat = from_batch(gy);
        Map gw(g, out_, rows());
        VecMap gb(g + static_cast<std::size_t>(out_) * rows(), out_);
        gw.noalias() += gmat * cols.transpose();
        gb += gmat.rowwise().sum();
        const Eigen::MatrixXd gcols = ConstMap(p, out_, rows()).transpose() * gmat;
        return col2im(gcols, x.cols());
    }

    void init(double* p, CounterRng& rng) const override {
        const int taps = dims_ == 1 ? k_ : k_ * k_;
        glorot(p, static_cast<std::size_t>(out_) * rows(), in_ * taps, out_ * taps, rng);
        for (int i = 0; i < out_; ++i) p[static_cast<std::size_t>(out_) * rows() + i] = 0.0;
    }

private:
    Eigen::Index rows() const { return static_cast<Eigen::Index>(in_) * (dims_ == 1 ? k_ : k_ * k_); }
    Eigen::Index positions() const { return dims_ == 1 ? m_ : static_cast<Eigen::Index>(m_) * m_; }
    Eigen::Index spatial_size() const { return dims_ == 1 ? n_ : static_cast<Eigen::Index>(n_) * n_; }

    /// Column (b * positions + o) holds the receptive field of output
    /// position o of sample b; row (c * taps + t) is channel c, tap t.
    template <class Visit>
    void for_each_tap(Visit&& visit) const {
        if (dims_ == 1) {
            for (int o = 0; o < m_; ++o) {
                for (int t = 0; t < k_; ++t) {
                    const int i = o * s_ - p_ + t;
                    if (i >= 0 && i < n_) visit(o, t, i);
                }
            }
            return;
        }
        for (int oy = 0; oy < m_; ++oy) {
            for (int ox = 0; ox < m_; ++ox) {
                for (int ty = 0; ty < k_; ++ty) {
                    const int iy = oy * s_ - p_ + ty;
                    if (iy < 0 || iy >= n_) continue;
                    for (int tx = 0; tx < k_; ++tx) {
                        const int ix = ox * s_ - p_ + tx;
                        if (ix >= 0 && ix < n_) visit(oy * m_ + ox, ty * k_ + tx, iy * n_ + ix);
                    }
                }
            }
        }
    }

    Eigen::MatrixXd im2col(const Batch& x) const {
        const Eigen::Index taps = rows() / in_;
        Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(rows(), positions() * x.cols());
        for (Eigen::Index b = 0; b < x.cols(); ++b) {
            for (int c = 0; c < in_; ++c) {
                const Eigen::Index base = c * spatial_size();
                for_each_tap([&](Eigen::Index o, Eigen::Index t, Eigen::Index i) {
                    cols(c * taps + t, b * positions() + o) = x(base + i, b);
                });
            }
        }
        return cols;
    }

    Batch col2im(const Eigen::MatrixXd& cols, Eigen::Index batch) const {
        const Eigen::Index taps = rows() / in_;
        Batch x = Batch::Zero(in_ * spatial_size(), batch);
        for (Eigen::Index b = 0; b < batch; ++b) {
            for (int c = 0; c < in_; ++c) {
                const Eigen::Index base = c * spatial_size();
                for_each_tap([&](Eigen::Index o, Eigen::Index t, Eigen::Index i) {
                    x(base + i, b) += cols(c * taps + t, b * positions() + o);
                });
            }
        }
        return x;
    }

    Batch to_batch(const Eigen::MatrixXd& y, Eigen::Index batch) const {
        Batch out(out_ * positions(), batch);
        for (Eigen::Index b = 0; b < batch; ++b) {
            for (int c = 0; c < out_; ++c) {
                out.col(b).segment(c * positions(), positions()) = y.row(c).segment(b * positions(), positions()).transpose();
            }
        }
        return out;
    }

    Eigen::MatrixXd from_batch(const Batch& g) const {
        Eigen::MatrixXd out(out_, positions() * g.cols());
        for (Eigen::Index b = 0; b < g.cols(); ++b) {
            for (int c = 0; c < out_; ++c) {
                out.row(c).segment(b * positions(), positions()) = g.col(b).segment(c * positions(), positions()).transpose();
            }
        }
        return out;
    }

    int dims_, in_, out_, n_, k_, s_, p_, m_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Network

Network::Network(NetworkConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.architecture == Architecture::mlp) {
        int prev = config_.input_dim;
        for (int h : config_.hidden) {
            layers_.push_back(std::make_unique<Dense>(prev, h));
            layers_.push_back(std::make_unique<Swish>());
            prev = h;
        }
        layers_.push_back(std::make_unique<Dense>(prev, config_.output_dim));
    } else {
        const int dims = config_.architecture == Architecture::conv1d ? 1 : 2;
        int channels = 1;
        int n = config_.spatial;
        for (int h : config_.hidden) {
            layers_.push_back(std::make_unique<Conv>(dims, channels, h, n, config_.kernel, config_.stride,
                                                     config_.padding));
            layers_.push_back(std::make_unique<Swish>());
            channels = h;
            n = conv_out(n, config_.kernel, config_.stride, config_.padding);
        }
        layers_.push_back(std::make_unique<Dense>(channels * n * (dims == 2 ? n : 1), config_.output_dim));
    }
    for (const auto& l : layers_) parameter_count_ += l->parameter_count();
}

Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

NetworkParameters Network::init(std::uint64_t seed) const {
    NetworkParameters p{config_, std::vector<double>(parameter_count_, 0.0)};
    double* cursor = p.values.data();
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        CounterRng rng(derive_seed(seed, "init", l));
        layers_[l]->init(cursor, rng);
        cursor += layers_[l]->parameter_count();
    }
    return p;
}

Network::Tape Network::forward_tape(std::span<const double> params, const Batch& inputs) const {
    EFEO_REQUIRE(params.size() == parameter_count_, "network: parameter vector has the wrong length");
    EFEO_REQUIRE(inputs.rows() == config_.input_dim, "network: input has the wrong dimension");
    Tape tape;
    tape.activations.reserve(layers_.size() + 1);
    tape.activations.push_back(inputs);
    const double* cursor = params.data();
    for (const auto& l : layers_) {
        tape.activations.push_back(l->forward(cursor, tape.activations.back()));
        cursor += l->parameter_count();
    }
    return tape;
}

Batch Network::forward(std::span<const double> params, const Batch& inputs) const {
    EFEO_REQUIRE(params.size() == parameter_count_, "network: parameter vector has the wrong length");
    EFEO_REQUIRE(inputs.rows() == config_.input_dim, "network: input has the wrong dimension");
    Batch x = inputs;
    const double* cursor = params.data();
    for (const auto& l : layers_) {
        x = l->forward(cursor, x);
        cursor += l->parameter_count();
    }
    return x;
}

Eigen::VectorXd Network::forward(std::span<const double> params, const Eigen::VectorXd& input) const {
    return forward(params, Batch(input)).col(0);
}

void Network::backward(std::span<const double> params, const Tape& tape, const Batch& output_grad,
                       std::span<double> grad) const {
    EFEO_REQUIRE(grad.size() == parameter_count_ && params.size() == parameter_count_,
                 "network: gradient vector has the wrong length");
    EFEO_REQUIRE(tape.activations.size() == layers_.size() + 1, "network: tape does not match the network");
    std::vector<std::size_t> offsets(layers_.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        offsets[l] = off;
        off += layers_[l]->parameter_count();
    }
    Batch g = output_grad;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        g = layers_[l]->backward(params.data() + offsets[l], tape.activations[l], tape.activations[l + 1], g,
                                 grad.data() + offsets[l]);
    }
}

}  // namespace efeo
