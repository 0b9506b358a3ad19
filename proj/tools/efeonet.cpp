// efeonet: solve, train and evaluate enriched FEM operator networks.

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "efeo/error.hpp"
#include "efeo/evaluation.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace efeo;
using efeo::cli::RunConfig;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Flag values as parsed; only options that were given override the config.
struct Flags {
    std::string config, problem, mode, out, checkpoint, forcing, modes, grids, optimizer, encoding, architecture,
        hidden, epsilons, cache_dir;
    double epsilon = 0, lr = 0;
    int mesh_n = 0, resolution = 0, samples = 0, n_test = 0, n_ref = 0, steps = 0, max_iterations = 0;
    std::int64_t forcing_index = -1;
    std::uint64_t seed = 0;
    bool no_timing = false, precondition = false;
    std::map<std::string, CLI::Option*> opts;
};

void add_common(CLI::App* cmd, Flags& f) {
    f.opts["config"] = cmd->add_option("--config", f.config, "JSON config document (flags win)");
    f.opts["problem"] =
        cmd->add_option("--problem", f.problem, "paradigm1d | boundary1d | interior1d | square2d");
    f.opts["epsilon"] = cmd->add_option("--epsilon", f.epsilon, "singular perturbation parameter");
    f.opts["mesh-n"] = cmd->add_option("--mesh-n", f.mesh_n, "uniform elements per axis");
    f.opts["resolution"] = cmd->add_option("--resolution", f.resolution, "output / input grid points per axis");
    f.opts["samples"] = cmd->add_option("--samples", f.samples, "forcings per training step (M)");
    f.opts["mode"] = cmd->add_option("--mode", f.mode, "train: online|fixed; solve/eval: oracle|plain");
    f.opts["seed"] = cmd->add_option("--seed", f.seed, "top-level seed");
    f.opts["out"] = cmd->add_option("--out", f.out, "output directory");
    f.opts["checkpoint"] = cmd->add_option("--checkpoint", f.checkpoint, "model checkpoint (.efeo)");
    f.opts["forcing"] = cmd->add_option("--forcing", f.forcing, "m0,m1,n0,n1[,n2,n3]");
    f.opts["forcing-index"] = cmd->add_option("--forcing-index", f.forcing_index, "draw index when --forcing is absent");
    f.opts["n-test"] = cmd->add_option("--n-test", f.n_test, "number of test forcings");
    f.opts["n-ref"] = cmd->add_option("--n-ref", f.n_ref, "Shishkin reference elements (per axis)");
    f.opts["no-timing"] = cmd->add_flag("--no-timing", f.no_timing, "write '-' for wall times");
    f.opts["cache-dir"] = cmd->add_option("--cache-dir", f.cache_dir, "reference solution cache directory");
}

void add_training(CLI::App* cmd, Flags& f) {
    f.opts["steps"] = cmd->add_option("--steps", f.steps, "optimizer steps");
    f.opts["max-iterations"] = cmd->add_option("--max-iterations", f.max_iterations, "iterations per step");
    f.opts["lr"] = cmd->add_option("--lr", f.lr, "learning rate");
    f.opts["optimizer"] = cmd->add_option("--optimizer", f.optimizer, "lbfgs | adam");
    f.opts["hidden"] = cmd->add_option("--hidden", f.hidden, "comma-separated hidden widths / channels");
    f.opts["architecture"] = cmd->add_option("--architecture", f.architecture, "mlp | conv1d | conv2d");
    f.opts["encoding"] = cmd->add_option("--encoding", f.encoding, "forcing_values | load_vector");
    f.opts["precondition"] = cmd->add_flag("--precondition", f.precondition, "row-scale the residual");
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool given(const Flags& f, const std::string& name) {
    const auto it = f.opts.find(name);
    return it != f.opts.end() && it->second->count() > 0;
}

RunConfig merge(const Flags& f) {
    RunConfig c = given(f, "config") ? cli::load_config_file(f.config) : RunConfig{};
    if (given(f, "problem")) c.problem = f.problem;
    if (given(f, "epsilon")) c.epsilon = f.epsilon;
    if (given(f, "mesh-n")) c.mesh_n = f.mesh_n;
    if (given(f, "resolution")) c.resolution = f.resolution;
    if (given(f, "samples")) c.samples = f.samples;
    if (given(f, "mode")) c.mode = f.mode;
    if (given(f, "seed")) c.seed = f.seed;
    if (given(f, "out")) c.out = f.out;
    if (given(f, "checkpoint")) c.checkpoint = f.checkpoint;
    if (given(f, "forcing")) c.forcing = f.forcing;
    if (given(f, "forcing-index")) c.forcing_index = f.forcing_index;
    if (given(f, "n-test")) c.n_test = f.n_test;
    if (given(f, "n-ref")) c.n_ref = f.n_ref;
    if (given(f, "no-timing")) c.timing = false;
    if (given(f, "cache-dir")) c.cache_dir = f.cache_dir;
    if (given(f, "modes")) c.modes = split(f.modes);
    if (given(f, "epsilons")) {
        c.epsilons.clear();
        for (const std::string& e : split(f.epsilons)) {
            try {
                c.epsilons.push_back(std::stod(e));
            } catch (const std::exception&) {
                throw UsageError("--epsilons: cannot parse '" + e + "'");
            }
        }
    }
    if (given(f, "grids")) c.grids = split(f.grids);
    if (given(f, "steps")) c.steps = f.steps;
    if (given(f, "max-iterations")) c.max_iterations = f.max_iterations;
    if (given(f, "lr")) c.learning_rate = f.lr;
    if (given(f, "optimizer")) c.optimizer = f.optimizer;
    if (given(f, "architecture")) c.architecture = f.architecture;
    if (given(f, "encoding")) c.encoding = f.encoding;
    if (given(f, "precondition")) c.precondition = true;
    if (given(f, "hidden")) {
        c.hidden.clear();
        for (const std::string& h : split(f.hidden)) {
            try {
                c.hidden.push_back(std::stoi(h));
            } catch (const std::exception&) {
                throw UsageError("--hidden: cannot parse '" + h + "'");
            }
        }
    }
    return c;
}

void require_problem(const RunConfig& c, bool need_epsilon = true) {
    if (c.problem.empty()) throw UsageError("--problem is required");
    if (need_epsilon && !c.epsilon) throw UsageError("--epsilon is required");
}

fs::path prepare_out(const RunConfig& c) {
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir.string());
    const fs::path probe = dir / ".efeonet-write-test";
    {
        std::ofstream t(probe);
        if (!t) throw IoError("output directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
    return dir;
}

void write_metadata(const fs::path& dir, const std::string& command, const RunConfig& c, const std::string& started,
                    nlohmann::json extra = nlohmann::json::object()) {
    nlohmann::json m{{"command", command},
                     {"version", EFEO_VERSION},
                     {"config", cli::to_json(c)},
                     {"started", started},
                     {"finished", iso_now()}};
    // defaults the method leaves open, so runs can be compared
    if (!c.problem.empty() && c.epsilon) {
        const ProblemSpec problem = ProblemSpec::by_name(c.problem, *c.epsilon);
        const int n_ref = c.n_ref.value_or(default_reference_resolution(problem));
        const ShishkinSpec sh = reference_shishkin_spec(problem, n_ref);
        m["reference"] = {{"n_ref", n_ref}, {"n_ref_default", !c.n_ref.has_value()}, {"sigma", sh.sigma}, {"beta", sh.beta}};
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    const fs::path p = dir / "metadata.json";
    std::ofstream out(p);
    if (!out) throw IoError("cannot write metadata: " + p.string());
    out << m.dump(2) << '\n';
}

std::shared_ptr<const EnrichedSpace> space_for(const ProblemSpec& problem, int n, bool enriched) {
    if (n < 2) throw UsageError("--mesh-n must be at least 2");
    if (problem.dimension() == 1) {
        const Mesh1D mesh = build_uniform_mesh_1d(problem.x_domain.lo, problem.x_domain.hi, n);
        return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(problem, mesh)
                                                              : build_plain_space(mesh));
    }
    const Mesh2D mesh = build_tensor_mesh_2d(n, n);
    return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(problem, mesh)
                                                          : build_plain_space(mesh));
}

ForcingParams forcing_of(const RunConfig& c, const ProblemSpec& problem) {
    if (!c.forcing.empty()) return parse_forcing(c.forcing, problem.cls);
    if (c.forcing_index < 0) throw UsageError("--forcing or --forcing-index is required");
    return sample_forcing(cli::sampling_of(c), problem.cls, static_cast<std::uint64_t>(c.forcing_index), "test");
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& c) {
    const std::string started = iso_now();
    require_problem(c);
    const ProblemSpec problem = ProblemSpec::by_name(c.problem, *c.epsilon);
    const std::string mode = c.mode.empty() ? "oracle" : c.mode;
    if (mode != "oracle" && mode != "plain") throw UsageError("solve: --mode must be oracle or plain");
    const ForcingParams f = forcing_of(c, problem);
    const fs::path dir = prepare_out(c);
    const Solution sol = fem_oracle(problem, space_for(problem, c.mesh_n, mode == "oracle"), f);
    write_solution_csv(sol, c.resolution, (dir / "solution.csv").string());
    {
        std::ofstream out(dir / "coefficients.csv");
        if (!out) throw IoError("cannot write " + (dir / "coefficients.csv").string());
        out << "index,alpha\n" << std::setprecision(17);
        for (Eigen::Index i = 0; i < sol.coefficients.size(); ++i) out << i << ',' << sol.coefficients(i) << '\n';
    }
    write_metadata(dir, "solve", c, started, {{"forcing", f.flat()}, {"total_dim", sol.space->total_dim()}});
    return 0;
}

int cmd_reference(const RunConfig& c) {
    const std::string started = iso_now();
    require_problem(c);
    const ProblemSpec problem = ProblemSpec::by_name(c.problem, *c.epsilon);
    const ForcingParams f = forcing_of(c, problem);
    const fs::path dir = prepare_out(c);
    const int n_ref = c.n_ref.value_or(default_reference_resolution(problem));
    const GridFunction g = shishkin_reference(problem, f, n_ref);
    write_grid_function_csv(g, (dir / "reference.csv").string());
    write_metadata(dir, "reference", c, started, {{"forcing", f.flat()}, {"n_ref", n_ref}});
    return 0;
}

int cmd_train(const RunConfig& c) {
    const std::string started = iso_now();
    require_problem(c);
    const ProblemSpec problem = ProblemSpec::by_name(c.problem, *c.epsilon);
    TrainConfig tc;
    tc.optimizer = c.optimizer == "adam" ? OptimizerKind::adam : OptimizerKind::lbfgs;
    if (c.optimizer != "adam" && c.optimizer != "lbfgs") throw UsageError("--optimizer must be lbfgs or adam");
    tc.learning_rate = c.learning_rate;
    tc.max_iterations = c.max_iterations;
    tc.history_size = c.history_size;
    tc.steps = c.steps;
    tc.samples = c.samples;
    tc.mode = sampling_mode_from_string(c.mode.empty() ? "online" : c.mode);
    tc.seed = c.seed;
    tc.loss_tolerance = c.loss_tolerance;
    tc.precondition = c.precondition;
    tc.encoding = encoding_from_string(c.encoding);
    tc.resolution = c.resolution;
    tc.sampling = cli::sampling_of(c);
    tc.validate();

    const auto space = space_for(problem, c.mesh_n, true);
    NetworkConfig net;
    net.architecture = architecture_from_string(c.architecture);
    net.input_dim = input_dim_for(problem, space->total_dim(), tc.encoding, tc.resolution);
    net.output_dim = static_cast<int>(space->total_dim());
    net.hidden = c.hidden;
    if (net.architecture != Architecture::mlp) {
        if (tc.encoding != InputEncoding::forcing_values) throw UsageError("conv networks need forcing_values input");
        net.spatial = tc.resolution;
    }
    net.validate();

    const fs::path dir = prepare_out(c);
    const fs::path model = dir / "model.efeo";
    const fs::path history = dir / "history.csv";
    try {
        const OracleSolver oracle(problem, space);
        const TrainResult r = train(problem, oracle, net, tc);
        nlohmann::json meta{{"problem", c.problem},       {"epsilon", *c.epsilon},
                            {"mesh_n", c.mesh_n},         {"resolution", c.resolution},
                            {"encoding", c.encoding},     {"samples", c.samples},
                            {"seed", c.seed},             {"mode", std::string(to_string(tc.mode))},
                            {"steps", c.steps},           {"version", EFEO_VERSION}};
        save_checkpoint(r.params, model.string(), meta);
        write_history_csv(r.history, history.string(), c.timing);
        write_metadata(dir, "train", c, started,
                       {{"network", to_json(net)},
                        {"final_loss", r.history.back().loss},
                        {"line_search_failures", r.line_search_failures}});
    } catch (...) {
        std::error_code ec;
        fs::remove(model, ec);
        fs::remove(history, ec);
        throw;
    }
    return 0;
}

std::vector<GridKind> grids_of(const RunConfig& c) {
    std::vector<GridKind> g;
    for (const std::string& s : c.grids) g.push_back(grid_kind_from_string(s));
    if (g.empty()) throw UsageError("at least one grid is required");
    return g;
}

int cmd_eval(RunConfig c) {
    const std::string started = iso_now();
    ExperimentSpec spec;
    if (!c.checkpoint.empty()) {
        const Checkpoint ck = load_checkpoint(c.checkpoint);
        const nlohmann::json& m = ck.metadata;
        try {
            if (c.problem.empty()) c.problem = m.at("problem").get<std::string>();
            if (!c.epsilon) c.epsilon = m.at("epsilon").get<double>();
            c.mesh_n = m.at("mesh_n").get<int>();
            c.resolution = m.at("resolution").get<int>();
            c.encoding = m.value("encoding", std::string("forcing_values"));
            spec.train_samples = m.value("samples", 0);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(std::string("checkpoint metadata is incomplete: ") + e.what());
        }
        require_problem(c);
        spec.model = std::make_shared<const CoefficientModel>(ck.params, encoding_from_string(c.encoding),
                                                              c.resolution,
                                                              ProblemSpec::by_name(c.problem, *c.epsilon));
        spec.mode = SolverMode::trained;
    } else {
        require_problem(c);
        spec.mode = solver_mode_from_string(c.mode.empty() ? "oracle" : c.mode);
        if (spec.mode == SolverMode::trained) throw UsageError("eval: trained mode needs --checkpoint");
    }
    spec.problem_name = c.problem;
    spec.epsilon = *c.epsilon;
    spec.mesh_n = c.mesh_n;
    spec.n_test = c.n_test;
    spec.seed = c.seed;
    spec.n_ref = c.n_ref;
    spec.grids = grids_of(c);
    spec.sampling = cli::sampling_of(c);
    spec.reference_cache_dir = c.cache_dir;
    const fs::path dir = prepare_out(c);
    const std::vector<ErrorReport> reports = run_experiment(spec);
    write_reports_csv(reports, (dir / "report.csv").string(), c.timing);

    // plot data for the first test forcing
    const ProblemSpec problem = spec.problem();
    const ForcingParams f = test_forcings(problem, spec.sampling, spec.seed, 1).front();
    const auto space = space_for(problem, spec.mesh_n, spec.mode != SolverMode::plain);
    const OracleSolver oracle(problem, space);
    const Solution pred = spec.mode == SolverMode::trained ? Solution{spec.model->predict(f, oracle.loads()), space}
                                                           : oracle.solve(f);
    const GridFunction ref = shishkin_reference(problem, f, spec.n_ref);
    write_plot_csv(pred, ref, uniform_grid(problem), (dir / "plot.csv").string());
    write_metadata(dir, "eval", c, started, {{"mode", std::string(to_string(spec.mode))}});
    return 0;
}

int cmd_sweep(const RunConfig& c) {
    const std::string started = iso_now();
    require_problem(c, false);
    if (c.modes.empty()) throw UsageError("--modes must name at least one mode");
    std::vector<SolverMode> modes;
    for (const std::string& m : c.modes) {
        modes.push_back(solver_mode_from_string(m));
        if (modes.back() == SolverMode::trained) throw UsageError("sweep supports oracle and plain modes");
    }
    const std::vector<double> eps = c.epsilon ? std::vector<double>{*c.epsilon} : c.epsilons;
    const fs::path dir = prepare_out(c);
    std::vector<ErrorReport> all;
    for (double e : eps) {
        for (SolverMode m : modes) {
            ExperimentSpec spec;
            spec.problem_name = c.problem;
            spec.epsilon = e;
            spec.mode = m;
            spec.mesh_n = c.mesh_n;
            spec.n_test = c.n_test;
            spec.seed = c.seed;
            spec.n_ref = c.n_ref;
            spec.grids = grids_of(c);
            spec.sampling = cli::sampling_of(c);
            spec.reference_cache_dir = c.cache_dir;
            for (ErrorReport& r : run_experiment(spec)) all.push_back(std::move(r));
        }
    }
    write_reports_csv(all, (dir / "report.csv").string(), c.timing);
    write_metadata(dir, "sweep", c, started, {{"rows", all.size()}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Enriched FEM operator networks for singularly perturbed convection-diffusion", "efeonet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", EFEO_VERSION);

    CLI::App* solve = app.add_subcommand("solve", "enriched FEM oracle for one forcing");
    CLI::App* train = app.add_subcommand("train", "data-free training of the coefficient network");
    CLI::App* eval = app.add_subcommand("eval", "error report against Shishkin references");
    CLI::App* sweep = app.add_subcommand("sweep", "error reports over epsilon and solver modes");
    CLI::App* reference = app.add_subcommand("reference", "Shishkin-mesh reference solution");
    // Each subcommand owns its own option objects; flags share storage since
    // exactly one subcommand runs.
    std::vector<Flags> per(5);
    CLI::App* cmds[] = {solve, train, eval, sweep, reference};
    for (int i = 0; i < 5; ++i) add_common(cmds[i], per[i]);
    add_training(train, per[1]);
    per[3].opts["modes"] = sweep->add_option("--modes", per[3].modes, "comma-separated: oracle,plain");
    per[3].opts["epsilons"] = sweep->add_option("--epsilons", per[3].epsilons, "comma-separated epsilon list");
    per[2].opts["grids"] = eval->add_option("--grids", per[2].grids, "uniform,graded");
    per[3].opts["grids"] = sweep->add_option("--grids", per[3].grids, "uniform,graded");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        for (int i = 0; i < 5; ++i) {
            if (!cmds[i]->parsed()) continue;
            const RunConfig c = merge(per[i]);
            switch (i) {
                case 0: return cmd_solve(c);
                case 1: return cmd_train(c);
                case 2: return cmd_eval(c);
                case 3: return cmd_sweep(c);
                default: return cmd_reference(c);
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "efeonet: usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kExitUsage;
    } catch (const cli::ConfigError& e) {
        std::cerr << "efeonet: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "efeonet: invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "efeonet: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "efeonet: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "efeonet: numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 1;
}
