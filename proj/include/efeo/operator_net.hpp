#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "efeo/assembly.hpp"
#include "efeo/linalg.hpp"
#include "efeo/network.hpp"
#include "efeo/problem.hpp"
#include "efeo/sampling.hpp"
#include "efeo/solvers.hpp"

namespace efeo {

/// What the network sees for a forcing f.
///   forcing_values  f on the uniform grid of `resolution` points (per axis)
///   load_vector     the assembled load vector F
enum class InputEncoding { forcing_values, load_vector };

/// Paired network inputs and load vectors, one sample per column.
struct ResidualBatch {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd loads;
    std::size_t size() const { return static_cast<std::size_t>(loads.cols()); }
};

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// loss = (1/M) sum_m ||A net(x_m) - F_m||^2; the gradient is the reverse
/// sweep of the network seeded with (2/M) A^T (A alpha_m - F_m).
/// Throws NumericalError naming the sample whose residual is not finite.
LossAndGrad residual_loss_and_grad(const Network& net, std::span<const double> params,
                                   const DenseMatrix& a, const ResidualBatch& batch);
double residual_loss(const Network& net, std::span<const double> params, const DenseMatrix& a,
                     const ResidualBatch& batch);

/// Sum over samples and test functions of |B[u_m, phi_i] - l(phi_i; w_m)|^2 / M
/// from explicit coefficient vectors, one per column.
double residual_loss_of_coefficients(const DenseMatrix& a, const Eigen::MatrixXd& coeffs,
                                     const Eigen::MatrixXd& loads);

/// Row scales 1/||row_i(A)||_2 used by the optional residual preconditioning.
Vector residual_row_scales(const DenseMatrix& a);

enum class OptimizerKind { lbfgs, adam };
enum class SamplingMode { online, fixed };

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::lbfgs;
    double learning_rate = 0.1;
    int max_iterations = 100;   ///< optimizer iterations per step
    int history_size = 100;
    int steps = 200;
    int samples = 64;           ///< M
    SamplingMode mode = SamplingMode::online;
    std::uint64_t seed = 0;
    double loss_tolerance = 0.0;
    bool precondition = false;
    InputEncoding encoding = InputEncoding::forcing_values;
    int resolution = 201;
    SamplingSpec sampling{};

    void validate() const;
};

struct HistoryEntry {
    int step = 0;
    double loss = 0.0;
    double seconds = 0.0;
    int evaluations = 0;
    int line_search_failures = 0;
};

/// Network plus everything needed to turn a forcing into coefficients.
class CoefficientModel {
public:
    CoefficientModel(NetworkParameters params, InputEncoding encoding, int resolution,
                     const ProblemSpec& problem);

    const NetworkParameters& parameters() const { return params_; }
    const Network& network() const { return net_; }
    InputEncoding encoding() const { return encoding_; }
    int resolution() const { return resolution_; }

    Eigen::VectorXd encode(const ForcingParams& f, const LoadAssembler& loads) const;
    Vector predict(const ForcingParams& f, const LoadAssembler& loads) const;

private:
    NetworkParameters params_;
    Network net_;
    InputEncoding encoding_;
    int resolution_;
    ProblemSpec problem_;
};

struct TrainResult {
    NetworkParameters params;
    std::vector<HistoryEntry> history;
    int line_search_failures = 0;
};

/// Data-free training of the coefficient network on the residual loss. Online
/// mode draws M fresh forcings per step (purpose "train", index step*M + m);
/// fixed mode reuses the first M draws.
TrainResult train(const ProblemSpec& problem, const OracleSolver& oracle, const NetworkConfig& net,
                  const TrainConfig& config, std::optional<NetworkParameters> initial = std::nullopt);

/// Input width implied by the encoding for this problem/space.
int input_dim_for(const ProblemSpec& problem, std::size_t total_dim, InputEncoding encoding,
                  int resolution);
/// Builds the batch for the given forcings.
ResidualBatch make_batch(const ProblemSpec& problem, const LoadAssembler& loads,
                         const std::vector<ForcingParams>& forcings, InputEncoding encoding,
                         int resolution);

/// Checkpoint layout:
///   "EFEO1\n" | u64 LE header length | JSON header | u64 LE value count |
///   values as little-endian IEEE-754 doubles.
/// The header records the architecture and any caller metadata.
void save_checkpoint(const NetworkParameters& params, const std::string& path,
                     const nlohmann::json& metadata = nlohmann::json::object());

struct Checkpoint {
    NetworkParameters params;
    nlohmann::json metadata;
};

/// Throws IoError on bad magic, truncation or a shape different from `expected`.
Checkpoint load_checkpoint(const std::string& path,
                           const std::optional<NetworkConfig>& expected = std::nullopt);

nlohmann::json to_json(const NetworkConfig& config);
NetworkConfig network_config_from_json(const nlohmann::json& j);

/// With timing disabled the seconds column holds "-".
void write_history_csv(const std::vector<HistoryEntry>& history, const std::string& path,
                       bool timing = true);

std::string_view to_string(Architecture a);
std::string_view to_string(InputEncoding e);
std::string_view to_string(SamplingMode m);
Architecture architecture_from_string(std::string_view s);
InputEncoding encoding_from_string(std::string_view s);
SamplingMode sampling_mode_from_string(std::string_view s);

}  // namespace efeo
