#include "efeo/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "efeo/error.hpp"
#include "efeo/quadrature.hpp"

namespace efeo {

double relative_l2(std::span<const double> pred, std::span<const double> ref, std::span<const double> weights) {
    EFEO_REQUIRE(pred.size() == ref.size() && ref.size() == weights.size(), "relative_l2: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = pred[i] - ref[i];
        num += weights[i] * d * d;
        den += weights[i] * ref[i] * ref[i];
    }
    EFEO_REQUIRE(den > 0.0, "relative_l2: reference has zero norm");
    return std::sqrt(num / den);
}

std::vector<double> trapezoid_weights(std::span<const double> x) {
    EFEO_REQUIRE(x.size() >= 2, "trapezoid_weights: need at least two points");
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        EFEO_REQUIRE(h > 0.0, "trapezoid_weights: abscissae must increase");
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

namespace {

EvalGrid tensor_grid(GridKind kind, std::span<const double> x, std::span<const double> y) {
    EvalGrid g;
    g.kind = kind;
    const std::vector<double> wx = trapezoid_weights(x);
    const std::vector<double> wy = trapezoid_weights(y);
    for (std::size_t j = 0; j < y.size(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            g.points.push_back({x[i], y[j]});
            g.weights.push_back(wx[i] * wy[j]);
        }
    }
    return g;
}

std::vector<double> linspace(Interval iv, int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = iv.lo + iv.length() * i / (n - 1);
    x.back() = iv.hi;
    return x;
}

}  // namespace

EvalGrid uniform_grid(const ProblemSpec& problem, std::optional<int> resolution) {
    const int r = resolution.value_or(problem.dimension() == 1 ? 201 : 51);
    EFEO_REQUIRE(r >= 2, "uniform_grid: resolution must be at least 2");
    const std::vector<double> x = linspace(problem.x_domain, r);
    if (problem.dimension() == 2) return tensor_grid(GridKind::uniform, x, linspace(problem.y_domain, r));
    EvalGrid g;
    g.kind = GridKind::uniform;
    for (double v : x) g.points.push_back({v, 0.0});
    g.weights = trapezoid_weights(x);
    return g;
}

EvalGrid graded_grid(const ProblemSpec& problem, std::optional<int> intervals) {
    const int n = intervals.value_or(problem.dimension() == 1 ? 400 : 100);
    EFEO_REQUIRE(n >= 8 && n % 4 == 0, "graded_grid: interval count must be a positive multiple of 4");
    const ShishkinSpec sx = reference_shishkin_spec(problem, n, 0);
    const Mesh1D mx = build_shishkin_mesh_1d(problem.x_domain.lo, problem.x_domain.hi, sx, problem.epsilon);
    if (problem.dimension() == 2) {
        const ShishkinSpec sy = reference_shishkin_spec(problem, n, 1);
        const Mesh1D my = build_shishkin_mesh_1d(problem.y_domain.lo, problem.y_domain.hi, sy, problem.epsilon);
        return tensor_grid(GridKind::graded, mx.nodes(), my.nodes());
    }
    EvalGrid g;
    g.kind = GridKind::graded;
    for (double v : mx.nodes()) g.points.push_back({v, 0.0});
    g.weights = trapezoid_weights(mx.nodes());
    return g;
}

double relative_l2_error(const Solution& sol, const GridFunction& ref, const EvalGrid& grid) {
    std::vector<double> pred, exact;
    pred.reserve(grid.points.size());
    exact.reserve(grid.points.size());
    for (const Point& p : grid.points) {
        pred.push_back(sol.value(p));
        exact.push_back(ref.value(p));
    }
    return relative_l2(pred, exact, grid.weights);
}

double relative_l2_error(const Solution& pred, const Solution& target, const EvalGrid& grid) {
    std::vector<double> a, b;
    a.reserve(grid.points.size());
    b.reserve(grid.points.size());
    for (const Point& p : grid.points) {
        a.push_back(pred.value(p));
        b.push_back(target.value(p));
    }
    return relative_l2(a, b, grid.weights);
}

namespace {

/// Sorted union of both meshes' nodes and the graded layer breakpoints.
std::vector<double> merged_breakpoints(const EnrichedSpace& space, const Mesh1D& ref) {
    const AxisBasis& axis = space.x_axis();
    std::vector<double> pts(axis.mesh().nodes().begin(), axis.mesh().nodes().end());
    pts.insert(pts.end(), ref.nodes().begin(), ref.nodes().end());
    for (std::size_t c = 0; c < axis.corrector_count(); ++c) {
        const double layer = axis.corrector(c).layer_point();
        const std::vector<double> b = layer_breakpoints(ref.left(), ref.right(), std::span(&layer, 1),
                                                        axis.corrector(c).layer_scale());
        pts.insert(pts.end(), b.begin(), b.end());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

double h1_error_1d(const Solution& sol, const GridFunction& ref) {
    EFEO_REQUIRE(ref.dimension() == 1 && sol.space->dimension() == 1, "h1_error_1d: 1D only");
    const std::vector<double> pts = merged_breakpoints(*sol.space, ref.x);
    const GaussRule& rule = gauss_legendre(6);
    const std::span<const double> coeffs(sol.coefficients.data(), static_cast<std::size_t>(sol.coefficients.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        const double half = 0.5 * (pts[i + 1] - pts[i]);
        for (int g = 0; g < rule.order(); ++g) {
            const double x = mid + half * rule.nodes[static_cast<std::size_t>(g)];
            const BasisValue u = sol.space->combine(coeffs, {x, 0.0});
            const double dv = u.value - ref.value({x, 0.0});
            const double dd = u.grad[0] - ref.derivative(x);
            sum += half * rule.weights[static_cast<std::size_t>(g)] * (dv * dv + dd * dd);
        }
    }
    return std::sqrt(sum);
}

double h1_norm_1d(const GridFunction& ref) {
    EFEO_REQUIRE(ref.dimension() == 1, "h1_norm_1d: 1D only");
    double sum = 0.0;
    for (std::size_t e = 0; e < ref.x.element_count(); ++e) {
        const double h = ref.x.width(e);
        const double a = ref.values[e];
        const double b = ref.values[e + 1];
        sum += h * (a * a + a * b + b * b) / 3.0 + (b - a) * (b - a) / h;
    }
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Experiments

std::vector<ForcingParams> test_forcings(const ProblemSpec& problem, const SamplingSpec& sampling,
                                         std::uint64_t seed, int count) {
    EFEO_REQUIRE(count >= 1, "test_forcings: count must be positive");
    SamplingSpec s = sampling;
    s.seed = seed;
    std::vector<ForcingParams> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out.push_back(sample_forcing(s, problem.cls, static_cast<std::uint64_t>(k), "test"));
    return out;
}

namespace {

std::shared_ptr<const EnrichedSpace> make_space(const ProblemSpec& problem, int n, bool enriched) {
    if (problem.dimension() == 1) {
        const Mesh1D mesh = build_uniform_mesh_1d(problem.x_domain.lo, problem.x_domain.hi, n);
        return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(problem, mesh)
                                                              : build_plain_space(mesh));
    }
    const Mesh2D mesh = build_tensor_mesh_2d(n, n);
    return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(problem, mesh)
                                                          : build_plain_space(mesh));
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

std::vector<ErrorReport> run_experiment(const ExperimentSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    const ProblemSpec problem = spec.problem();
    problem.validate();
    EFEO_REQUIRE(spec.mesh_n >= 2, "run_experiment: mesh_n must be at least 2");
    EFEO_REQUIRE(!spec.grids.empty(), "run_experiment: no evaluation grid requested");
    if (spec.mode == SolverMode::trained) EFEO_REQUIRE(spec.model != nullptr, "run_experiment: trained mode needs a model");

    const auto space = make_space(problem, spec.mesh_n, spec.mode != SolverMode::plain);
    const OracleSolver oracle(problem, space);
    if (spec.model) {
        EFEO_REQUIRE(static_cast<std::size_t>(spec.model->network().config().output_dim) == space->total_dim(),
                     "run_experiment: model output does not match the space (check mesh_n)");
    }
    const int n_ref = spec.n_ref.value_or(default_reference_resolution(problem));
    const ReferenceSolver reference(problem, n_ref);
    std::optional<ReferenceCache> cache;
    if (!spec.reference_cache_dir.empty()) cache.emplace(spec.reference_cache_dir);

    std::vector<EvalGrid> grids;
    for (GridKind k : spec.grids) {
        grids.push_back(k == GridKind::uniform ? uniform_grid(problem, spec.resolution) : graded_grid(problem));
    }
    std::vector<std::vector<double>> errors(grids.size());
    for (const ForcingParams& f : test_forcings(problem, spec.sampling, spec.seed, spec.n_test)) {
        std::optional<GridFunction> ref;
        std::string key;
        if (cache) {
            key = cache->key(problem, n_ref, f);
            ref = cache->load(key);
        }
        if (!ref) {
            ref = reference.solve(f);
            if (cache) cache->store(key, *ref);
        }
        Solution sol = spec.mode == SolverMode::trained
                           ? Solution{spec.model->predict(f, oracle.loads()), space}
                           : oracle.solve(f);
        for (std::size_t g = 0; g < grids.size(); ++g) errors[g].push_back(relative_l2_error(sol, *ref, grids[g]));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::vector<ErrorReport> out;
    for (std::size_t g = 0; g < grids.size(); ++g) {
        ErrorReport r;
        r.problem = problem.cls;
        r.problem_name = spec.problem_name;
        r.epsilon = spec.epsilon;
        r.mode = spec.mode;
        r.mesh_n = spec.mesh_n;
        r.samples = spec.mode == SolverMode::trained ? spec.train_samples : 0;
        r.grid = grids[g].kind;
        mean_std(errors[g], r.mean, r.std);
        r.n_test = spec.n_test;
        r.seconds = seconds;
        r.per_sample = std::move(errors[g]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ConvergenceRung> convergence_study(const ConvergenceSpec& spec) {
    const ProblemSpec problem = ProblemSpec::by_name(spec.problem_name, spec.epsilon);
    EFEO_REQUIRE(!spec.ladder.empty(), "convergence_study: empty ladder");
    EFEO_REQUIRE(spec.depth >= 0, "convergence_study: depth must be non-negative");
    const auto space = make_space(problem, spec.mesh_n, true);
    const OracleSolver oracle(problem, space);
    const EvalGrid grid = uniform_grid(problem, spec.train.resolution);
    const std::vector<ForcingParams> tests = test_forcings(problem, spec.train.sampling, spec.seed, spec.n_test);

    std::vector<Solution> targets;
    std::vector<GridFunction> refs;
    std::optional<ReferenceSolver> reference;
    if (spec.with_reference) reference.emplace(problem, default_reference_resolution(problem));
    for (const ForcingParams& f : tests) {
        targets.push_back(oracle.solve(f));
        if (reference) refs.push_back(reference->solve(f));
    }

    std::vector<ConvergenceRung> out;
    for (const auto& [width, samples] : spec.ladder) {
        NetworkConfig net;
        net.architecture = Architecture::mlp;
        net.input_dim = input_dim_for(problem, space->total_dim(), spec.train.encoding, spec.train.resolution);
        net.output_dim = static_cast<int>(space->total_dim());
        net.hidden.assign(static_cast<std::size_t>(spec.depth), width);
        TrainConfig tc = spec.train;
        tc.samples = samples;
        tc.seed = spec.seed;
        const TrainResult tr = train(problem, oracle, net, tc);
        const CoefficientModel model(tr.params, tc.encoding, tc.resolution, problem);
        ConvergenceRung rung{width, samples, 0.0, 0.0, tr.history.empty() ? 0.0 : tr.history.back().loss};
        for (std::size_t k = 0; k < tests.size(); ++k) {
            const Solution pred{model.predict(tests[k], oracle.loads()), space};
            rung.error_to_oracle += relative_l2_error(pred, targets[k], grid);
            if (reference) rung.error_to_reference += relative_l2_error(pred, refs[k], grid);
        }
        rung.error_to_oracle /= static_cast<double>(tests.size());
        rung.error_to_reference /= static_cast<double>(tests.size());
        out.push_back(rung);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output

std::string_view to_string(SolverMode m) {
    switch (m) {
        case SolverMode::oracle: return "oracle";
        case SolverMode::trained: return "trained";
        case SolverMode::plain: return "plain";
    }
    return "oracle";
}

std::string_view to_string(GridKind g) { return g == GridKind::uniform ? "uniform" : "graded"; }

SolverMode solver_mode_from_string(std::string_view s) {
    if (s == "oracle") return SolverMode::oracle;
    if (s == "trained") return SolverMode::trained;
    if (s == "plain" || s == "plain-fem") return SolverMode::plain;
    throw InvalidArgument("unknown solver mode: " + std::string(s));
}

GridKind grid_kind_from_string(std::string_view s) {
    if (s == "uniform") return GridKind::uniform;
    if (s == "graded" || s == "layer-graded") return GridKind::graded;
    throw InvalidArgument("unknown grid kind: " + std::string(s));
}

std::string reports_to_csv(const std::vector<ErrorReport>& reports, bool timing) {
    std::ostringstream s;
    s << "problem,epsilon,mode,mesh_n,M,grid,rel_l2_mean,rel_l2_std,n_test,seconds\n";
    for (const ErrorReport& r : reports) {
        s << r.problem_name << ',' << std::setprecision(6) << r.epsilon << ',' << to_string(r.mode) << ','
          << r.mesh_n << ',' << r.samples << ',' << to_string(r.grid) << ',' << std::setprecision(10) << r.mean
          << ',' << r.std << ',' << r.n_test << ',';
        if (timing) {
            s << std::fixed << std::setprecision(3) << r.seconds << std::defaultfloat;
        } else {
            s << '-';
        }
        s << '\n';
    }
    return s.str();
}

void write_reports_csv(const std::vector<ErrorReport>& reports, const std::string& path, bool timing) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report file: " + path);
    out << reports_to_csv(reports, timing);
    if (!out) throw IoError("cannot write report file: " + path);
}

void write_plot_csv(const Solution& pred, const GridFunction& ref, const EvalGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write plot file: " + path);
    const bool two = ref.dimension() == 2;
    out << (two ? "x,y,u_pred,u_ref\n" : "x,u_pred,u_ref\n") << std::setprecision(17);
    for (const Point& p : grid.points) {
        out << p[0] << ',';
        if (two) out << p[1] << ',';
        out << pred.value(p) << ',' << ref.value(p) << '\n';
    }
}

}  // namespace efeo
