#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efeo/basis.hpp"
#include "efeo/operator_net.hpp"
#include "efeo/problem.hpp"
#include "efeo/sampling.hpp"
#include "efeo/solvers.hpp"

namespace efeo {

/// sqrt(sum w (pred - ref)^2) / sqrt(sum w ref^2). Throws for a zero reference.
double relative_l2(std::span<const double> pred, std::span<const double> ref,
                   std::span<const double> weights);

/// Trapezoidal weights of a sorted 1D abscissa.
std::vector<double> trapezoid_weights(std::span<const double> x);

enum class GridKind { uniform, graded };

/// Evaluation points with quadrature weights.
struct EvalGrid {
    GridKind kind = GridKind::uniform;
    std::vector<Point> points;
    std::vector<double> weights;
};

/// Uniform grid: `resolution` points per axis (defaults 201 in 1D, 51 in 2D).
EvalGrid uniform_grid(const ProblemSpec& problem, std::optional<int> resolution = std::nullopt);
/// Layer-clustered grid: Shishkin-type node distribution with 400 intervals
/// in 1D (401 points) and 100 per axis in 2D.
EvalGrid graded_grid(const ProblemSpec& problem, std::optional<int> intervals = std::nullopt);

/// Relative L2 error of `sol` against `ref` sampled on `grid`.
double relative_l2_error(const Solution& sol, const GridFunction& ref, const EvalGrid& grid);
double relative_l2_error(const Solution& pred, const Solution& target, const EvalGrid& grid);

/// Full H1 norm of (sol - ref) on a 1D problem, integrated exactly on the
/// merged breakpoints of both meshes with 6-point Gauss-Legendre per piece.
double h1_error_1d(const Solution& sol, const GridFunction& ref);
double h1_norm_1d(const GridFunction& ref);

enum class SolverMode { oracle, trained, plain };

struct ErrorReport {
    ProblemClass problem = ProblemClass::boundary1d;
    std::string problem_name;
    double epsilon = 0.0;
    SolverMode mode = SolverMode::oracle;
    int mesh_n = 0;
    int samples = 0;  ///< training M (0 for solver modes)
    GridKind grid = GridKind::uniform;
    double mean = 0.0;
    double std = 0.0;
    int n_test = 0;
    double seconds = 0.0;
    std::vector<double> per_sample;
};

struct ExperimentSpec {
    std::string problem_name = "boundary1d";
    double epsilon = 1e-5;
    SolverMode mode = SolverMode::oracle;
    int mesh_n = 100;
    int n_test = 100;
    std::uint64_t seed = 0;
    std::optional<int> n_ref;
    std::optional<int> resolution;
    std::vector<GridKind> grids{GridKind::uniform, GridKind::graded};
    SamplingSpec sampling{};
    /// Required for SolverMode::trained.
    std::shared_ptr<const CoefficientModel> model;
    int train_samples = 0;
    std::string reference_cache_dir;  ///< empty disables caching

    ProblemSpec problem() const { return ProblemSpec::by_name(problem_name, epsilon); }
};

/// Test forcings use purpose "test" so they never coincide with training draws.
std::vector<ForcingParams> test_forcings(const ProblemSpec& problem, const SamplingSpec& sampling,
                                         std::uint64_t seed, int count);

std::vector<ErrorReport> run_experiment(const ExperimentSpec& spec);

struct ConvergenceRung {
    int width = 0;
    int samples = 0;
    double error_to_oracle = 0.0;
    double error_to_reference = 0.0;
    double final_loss = 0.0;
};

struct ConvergenceSpec {
    std::string problem_name = "boundary1d";
    double epsilon = 1e-3;
    int mesh_n = 100;
    std::vector<std::pair<int, int>> ladder{{8, 16}, {32, 64}, {128, 256}};
    int depth = 2;          ///< hidden layers per rung
    TrainConfig train{};    ///< samples is overridden per rung
    int n_test = 20;
    std::uint64_t seed = 0;
    bool with_reference = true;
};

/// Trains one network per rung (fixed seeds) and records the held-out error
/// to the enriched FEM oracle, plus the error to the Shishkin reference.
std::vector<ConvergenceRung> convergence_study(const ConvergenceSpec& spec);

/// Columns: problem,epsilon,mode,mesh_n,M,grid,rel_l2_mean,rel_l2_std,n_test,seconds.
/// With timing disabled the seconds column holds "-" so reruns are byte-identical.
std::string reports_to_csv(const std::vector<ErrorReport>& reports, bool timing = true);
void write_reports_csv(const std::vector<ErrorReport>& reports, const std::string& path,
                       bool timing = true);

/// Columns x[,y],u_pred,u_ref on `grid`.
void write_plot_csv(const Solution& pred, const GridFunction& ref, const EvalGrid& grid,
                    const std::string& path);

std::string_view to_string(SolverMode m);
std::string_view to_string(GridKind g);
SolverMode solver_mode_from_string(std::string_view s);
GridKind grid_kind_from_string(std::string_view s);

}  // namespace efeo
