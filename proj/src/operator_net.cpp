#include "efeo/operator_net.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "efeo/error.hpp"
#include "efeo/optim.hpp"

namespace efeo {

namespace {

/// Shared body of the residual loss. With `strict` a non-finite residual
/// throws naming the sample; otherwise the loss becomes +inf.
double residual_core(const Network& net, std::span<const double> params, const DenseMatrix& a,
                     const ResidualBatch& batch, std::vector<double>* grad, bool strict) {
    EFEO_REQUIRE(a.rows() == a.cols(), "residual loss: matrix must be square");
    EFEO_REQUIRE(batch.loads.rows() == a.rows(), "residual loss: load vectors do not match the matrix");
    EFEO_REQUIRE(batch.inputs.cols() == batch.loads.cols() && batch.size() > 0,
                 "residual loss: inputs and loads must pair up");
    EFEO_REQUIRE(net.config().output_dim == a.rows(), "residual loss: network output does not match the matrix");
    const double inv_m = 1.0 / static_cast<double>(batch.size());
    Network::Tape tape;
    Eigen::MatrixXd alpha;
    if (grad) {
        tape = net.forward_tape(params, batch.inputs);
        alpha = tape.activations.back();
    } else {
        alpha = net.forward(params, batch.inputs);
    }
    const Eigen::MatrixXd r = a * alpha - batch.loads;
    double loss = 0.0;
    for (Eigen::Index m = 0; m < r.cols(); ++m) {
        const double sq = r.col(m).squaredNorm();
        if (!std::isfinite(sq)) {
            if (strict) throw NumericalError("residual loss is not finite for sample " + std::to_string(m));
            if (grad) grad->assign(params.size(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
        loss += sq;
    }
    loss *= inv_m;
    if (grad) {
        grad->assign(params.size(), 0.0);
        const Eigen::MatrixXd seed = (2.0 * inv_m) * (a.transpose() * r);
        net.backward(params, tape, seed, *grad);
    }
    return loss;
}

}  // namespace

LossAndGrad residual_loss_and_grad(const Network& net, std::span<const double> params, const DenseMatrix& a,
                                   const ResidualBatch& batch) {
    LossAndGrad out;
    out.loss = residual_core(net, params, a, batch, &out.grad, true);
    return out;
}

double residual_loss(const Network& net, std::span<const double> params, const DenseMatrix& a,
                     const ResidualBatch& batch) {
    return residual_core(net, params, a, batch, nullptr, true);
}

double residual_loss_of_coefficients(const DenseMatrix& a, const Eigen::MatrixXd& coeffs,
                                     const Eigen::MatrixXd& loads) {
    EFEO_REQUIRE(coeffs.rows() == a.cols() && loads.rows() == a.rows() && coeffs.cols() == loads.cols() &&
                     coeffs.cols() > 0,
                 "residual loss: shape mismatch");
    return (a * coeffs - loads).squaredNorm() / static_cast<double>(coeffs.cols());
}

Vector residual_row_scales(const DenseMatrix& a) {
    Vector s(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double n = a.row(i).norm();
        EFEO_REQUIRE(n > 0.0, "residual_row_scales: zero row in the system matrix");
        s(i) = 1.0 / n;
    }
    return s;
}

void TrainConfig::validate() const {
    EFEO_REQUIRE(learning_rate > 0.0 && std::isfinite(learning_rate), "train: learning rate must be positive");
    EFEO_REQUIRE(max_iterations >= 1, "train: max iterations must be positive");
    EFEO_REQUIRE(history_size >= 1, "train: history size must be positive");
    EFEO_REQUIRE(steps >= 1, "train: step count must be positive");
    EFEO_REQUIRE(samples >= 1, "train: sample count must be positive");
    EFEO_REQUIRE(resolution >= 2, "train: resolution must be at least 2");
    EFEO_REQUIRE(loss_tolerance >= 0.0, "train: loss tolerance must be non-negative");
    sampling.validate();
}

int input_dim_for(const ProblemSpec& problem, std::size_t total_dim, InputEncoding encoding, int resolution) {
    if (encoding == InputEncoding::load_vector) return static_cast<int>(total_dim);
    return problem.dimension() == 1 ? resolution : resolution * resolution;
}

ResidualBatch make_batch(const ProblemSpec& problem, const LoadAssembler& loads,
                         const std::vector<ForcingParams>& forcings, InputEncoding encoding, int resolution) {
    EFEO_REQUIRE(!forcings.empty(), "make_batch: no forcings");
    const auto m = static_cast<Eigen::Index>(forcings.size());
    ResidualBatch b;
    b.loads.resize(static_cast<Eigen::Index>(loads.size()), m);
    b.inputs.resize(input_dim_for(problem, loads.size(), encoding, resolution), m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const ForcingParams& f = forcings[static_cast<std::size_t>(k)];
        b.loads.col(k) = loads(f);
        if (encoding == InputEncoding::load_vector) {
            b.inputs.col(k) = b.loads.col(k);
        } else {
            const std::vector<double> v = discretize_forcing(f, resolution, problem.x_domain, problem.y_domain);
            b.inputs.col(k) = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
    }
    return b;
}

CoefficientModel::CoefficientModel(NetworkParameters params, InputEncoding encoding, int resolution,
                                   const ProblemSpec& problem)
    : params_(std::move(params)), net_(params_.config), encoding_(encoding), resolution_(resolution),
      problem_(problem) {
    EFEO_REQUIRE(params_.values.size() == net_.parameter_count(), "CoefficientModel: parameter count mismatch");
}

Eigen::VectorXd CoefficientModel::encode(const ForcingParams& f, const LoadAssembler& loads) const {
    if (encoding_ == InputEncoding::load_vector) return loads(f);
    const std::vector<double> v = discretize_forcing(f, resolution_, problem_.x_domain, problem_.y_domain);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector CoefficientModel::predict(const ForcingParams& f, const LoadAssembler& loads) const {
    EFEO_REQUIRE(loads.size() == static_cast<std::size_t>(net_.config().output_dim),
                 "CoefficientModel: network output does not match the space");
    return net_.forward(params_.values, encode(f, loads));
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const ProblemSpec& problem, const OracleSolver& oracle, const NetworkConfig& net_config,
                  const TrainConfig& config, std::optional<NetworkParameters> initial) {
    config.validate();
    const std::size_t total = oracle.space()->total_dim();
    EFEO_REQUIRE(net_config.output_dim == static_cast<int>(total), "train: network output must equal total_dim");
    EFEO_REQUIRE(net_config.input_dim == input_dim_for(problem, total, config.encoding, config.resolution),
                 "train: network input does not match the encoding");
    const Network net(net_config);
    NetworkParameters params = initial ? std::move(*initial) : net.init(derive_seed(config.seed, "init", 0));
    EFEO_REQUIRE(params.config == net_config && params.values.size() == net.parameter_count(),
                 "train: initial parameters do not match the network");

    DenseMatrix a = oracle.matrix();
    Vector scales;
    if (config.precondition) {
        scales = residual_row_scales(a);
        a = scales.asDiagonal() * a;
    }

    SamplingSpec sampling = config.sampling;
    sampling.seed = config.seed;
    sampling.samples = config.samples;
    auto batch_for = [&](int step) {
        std::vector<ForcingParams> fs;
        fs.reserve(static_cast<std::size_t>(config.samples));
        const std::uint64_t base =
            config.mode == SamplingMode::online ? static_cast<std::uint64_t>(step) * config.samples : 0;
        for (int m = 0; m < config.samples; ++m) fs.push_back(sample_forcing(sampling, problem.cls, base + m));
        ResidualBatch b = make_batch(problem, oracle.loads(), fs, config.encoding, config.resolution);
        if (config.precondition) b.loads = scales.asDiagonal() * b.loads;
        return b;
    };

    Lbfgs lbfgs(LbfgsOptions{config.learning_rate, config.max_iterations,
                             config.max_iterations * 5 / 4, config.history_size});
    AdamOptions adam_opt;
    adam_opt.learning_rate = config.learning_rate;
    adam_opt.max_iterations = config.max_iterations;
    Adam adam(adam_opt);

    TrainResult result;
    const auto start = std::chrono::steady_clock::now();
    ResidualBatch batch;
    std::vector<double> grad;
    for (int step = 0; step < config.steps; ++step) {
        if (step == 0 || config.mode == SamplingMode::online) batch = batch_for(step);
        // Fail loudly on a bad starting point; line-search trials may overflow.
        if (step == 0) (void)residual_core(net, params.values, a, batch, nullptr, true);
        const Objective objective = [&](std::span<const double> x, std::span<double> g) {
            const double loss = residual_core(net, x, a, batch, &grad, false);
            std::copy(grad.begin(), grad.end(), g.begin());
            return loss;
        };
        const StepReport rep = config.optimizer == OptimizerKind::lbfgs ? lbfgs.step(objective, params.values)
                                                                        : adam.step(objective, params.values);
        const double loss = residual_core(net, params.values, a, batch, nullptr, true);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back({step, loss, seconds, rep.evaluations, rep.line_search_failures});
        result.line_search_failures += rep.line_search_failures;
        if (loss < config.loss_tolerance) break;
    }
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::mlp: return "mlp";
        case Architecture::conv1d: return "conv1d";
        case Architecture::conv2d: return "conv2d";
    }
    return "mlp";
}

std::string_view to_string(InputEncoding e) {
    return e == InputEncoding::forcing_values ? "forcing_values" : "load_vector";
}

std::string_view to_string(SamplingMode m) { return m == SamplingMode::online ? "online" : "fixed"; }

Architecture architecture_from_string(std::string_view s) {
    if (s == "mlp") return Architecture::mlp;
    if (s == "conv1d") return Architecture::conv1d;
    if (s == "conv2d") return Architecture::conv2d;
    throw InvalidArgument("unknown architecture: " + std::string(s));
}

InputEncoding encoding_from_string(std::string_view s) {
    if (s == "forcing_values" || s == "forcing") return InputEncoding::forcing_values;
    if (s == "load_vector" || s == "load") return InputEncoding::load_vector;
    throw InvalidArgument("unknown input encoding: " + std::string(s));
}

SamplingMode sampling_mode_from_string(std::string_view s) {
    if (s == "online") return SamplingMode::online;
    if (s == "fixed") return SamplingMode::fixed;
    throw InvalidArgument("unknown sampling mode: " + std::string(s));
}

nlohmann::json to_json(const NetworkConfig& c) {
    return {{"architecture", std::string(to_string(c.architecture))},
            {"input_dim", c.input_dim},
            {"output_dim", c.output_dim},
            {"hidden", c.hidden},
            {"kernel", c.kernel},
            {"stride", c.stride},
            {"padding", c.padding},
            {"spatial", c.spatial}};
}

NetworkConfig network_config_from_json(const nlohmann::json& j) {
    try {
        NetworkConfig c;
        c.architecture = architecture_from_string(j.at("architecture").get<std::string>());
        c.input_dim = j.at("input_dim").get<int>();
        c.output_dim = j.at("output_dim").get<int>();
        c.hidden = j.at("hidden").get<std::vector<int>>();
        c.kernel = j.value("kernel", 5);
        c.stride = j.value("stride", 2);
        c.padding = j.value("padding", 2);
        c.spatial = j.value("spatial", 0);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("network config: ") + e.what());
    }
}

namespace {

constexpr char kMagic[] = "EFEO1\n";
constexpr std::size_t kMagicLen = 6;

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
}

}  // namespace

void save_checkpoint(const NetworkParameters& params, const std::string& path, const nlohmann::json& metadata) {
    nlohmann::json header{{"format", "EFEO1"}, {"network", to_json(params.config)}, {"metadata", metadata},
                          {"count", params.values.size()}};
    const std::string text = header.dump();
    const std::filesystem::path tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint: " + path);
        out.write(kMagic, kMagicLen);
        put_u64(out, text.size());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        put_u64(out, params.values.size());
        for (double v : params.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
        if (!out) throw IoError("cannot write checkpoint: " + path);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path, const std::optional<NetworkConfig>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[kMagicLen];
    if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0) {
        throw IoError("checkpoint has a bad magic string (expected EFEO1): " + path);
    }
    std::uint64_t header_len = 0;
    if (!get_u64(in, header_len) || header_len > (1ULL << 30)) throw IoError("checkpoint header is truncated: " + path);
    std::string text(header_len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
        throw IoError("checkpoint header is truncated: " + path);
    }
    Checkpoint ck;
    try {
        const nlohmann::json header = nlohmann::json::parse(text);
        ck.params.config = network_config_from_json(header.at("network"));
        ck.metadata = header.value("metadata", nlohmann::json::object());
    } catch (const std::exception& e) {
        throw IoError(std::string("checkpoint header is invalid: ") + e.what());
    }
    std::uint64_t count = 0;
    if (!get_u64(in, count)) throw IoError("checkpoint parameter block is truncated: " + path);
    std::size_t expect_count = 0;
    try {
        expect_count = ck.params.config.parameter_count();
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("checkpoint architecture is invalid: ") + e.what());
    }
    if (count != expect_count) throw IoError("checkpoint parameter count does not match its architecture");
    ck.params.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        if (!get_u64(in, bits)) throw IoError("checkpoint parameter block is truncated: " + path);
        ck.params.values[i] = std::bit_cast<double>(bits);
    }
    if (expected && !(*expected == ck.params.config)) {
        throw IoError("checkpoint architecture " + ck.params.config.describe() + " does not match requested " +
                      expected->describe());
    }
    return ck;
}

void write_history_csv(const std::vector<HistoryEntry>& history, const std::string& path, bool timing) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write history file: " + path);
    out << "step,loss,seconds,evaluations,line_search_failures\n" << std::setprecision(17);
    for (const HistoryEntry& h : history) {
        out << h.step << ',' << h.loss << ',';
        if (timing) {
            out << h.seconds;
        } else {
            out << '-';
        }
        out << ',' << h.evaluations << ',' << h.line_search_failures << '\n';
    }
}

}  // namespace efeo
