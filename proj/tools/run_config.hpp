#pragma once

// Command-scoped settings shared by every efeonet subcommand. A JSON document
// supplies the base values; flags given on the command line override them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "efeo/evaluation.hpp"

namespace efeo::cli {

struct RunConfig {
    std::string problem;
    std::optional<double> epsilon;
    int mesh_n = 100;
    int resolution = 201;
    int samples = 64;
    std::string mode;  ///< command-specific: online|fixed (train), oracle|plain (solve/eval)
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string checkpoint;
    std::string forcing;
    std::int64_t forcing_index = -1;  ///< draw index when no explicit forcing is given
    std::vector<std::string> modes{"oracle", "plain"};
    std::vector<double> epsilons{1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<std::string> grids{"uniform"};
    int n_test = 100;
    std::optional<int> n_ref;
    bool timing = true;
    std::string cache_dir;

    // network / training
    std::string architecture = "mlp";
    std::vector<int> hidden{64, 64};
    std::string optimizer = "lbfgs";
    double learning_rate = 0.1;
    int max_iterations = 100;
    int history_size = 100;
    int steps = 200;
    double loss_tolerance = 0.0;
    bool precondition = false;
    std::string encoding = "forcing_values";
    Range amplitude{-2.0, 2.0};
    Range frequency{-2.0, 2.0};
};

/// Thrown for schema violations; the message starts with the JSON path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Applies every key of `j` onto `cfg`. Unknown keys and type mismatches
/// raise ConfigError naming the offending path (e.g. "/sampling/amplitude").
void apply_json(const nlohmann::json& j, RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

/// The sampling spec implied by the config.
SamplingSpec sampling_of(const RunConfig& cfg);

}  // namespace efeo::cli
