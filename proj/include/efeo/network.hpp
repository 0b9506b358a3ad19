#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace efeo {

enum class Architecture { mlp, conv1d, conv2d };

/// Feed-forward coefficient network. Activations are x * sigmoid(x) (swish).
///   mlp     input -> hidden[0] -> ... -> hidden[last] -> output, swish between layers.
///   conv1d  one input channel of length `spatial`; a strided convolution with
///           `hidden[l]` output channels per entry, each followed by swish,
///           then a fully connected layer to the output.
///   conv2d  as conv1d on a spatial x spatial image.
struct NetworkConfig {
    Architecture architecture = Architecture::mlp;
    int input_dim = 0;
    int output_dim = 0;
    std::vector<int> hidden;
    int kernel = 5;
    int stride = 2;
    int padding = 2;
    int spatial = 0;  ///< conv only: input length / image side

    void validate() const;
    std::size_t parameter_count() const;
    /// e.g. "mlp[201-64-64-100]".
    std::string describe() const;
    bool operator==(const NetworkConfig&) const = default;
};

/// Flat parameter vector; layer l owns a contiguous slice (weights then bias).
struct NetworkParameters {
    NetworkConfig config;
    std::vector<double> values;
};

double swish(double x);
double swish_derivative(double x);

using Batch = Eigen::MatrixXd;  ///< one sample per column

class Layer;

/// Layer stack with per-layer reverse-mode rules. Stateless apart from the
/// architecture, so one Network may serve concurrent forward passes.
class Network {
public:
    explicit Network(NetworkConfig config);
    ~Network();
    Network(Network&&) noexcept;
    Network& operator=(Network&&) noexcept;

    const NetworkConfig& config() const { return config_; }
    std::size_t parameter_count() const { return parameter_count_; }

    /// Uniform(-b, b) weights with b = sqrt(6 / (fan_in + fan_out)), zero
    /// biases; deterministic per seed.
    NetworkParameters init(std::uint64_t seed) const;

    Batch forward(std::span<const double> params, const Batch& inputs) const;
    Eigen::VectorXd forward(std::span<const double> params, const Eigen::VectorXd& input) const;

    /// Activations kept from a forward pass for the reverse sweep.
    struct Tape {
        std::vector<Batch> activations;  ///< input of each layer, then the output
    };
    Tape forward_tape(std::span<const double> params, const Batch& inputs) const;
    /// Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
    void backward(std::span<const double> params, const Tape& tape, const Batch& output_grad,
                  std::span<double> grad) const;

private:
    NetworkConfig config_;
    std::vector<std::unique_ptr<Layer>> layers_;
    std::size_t parameter_count_ = 0;
};

}  // namespace efeo
