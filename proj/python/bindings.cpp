#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "efeo/error.hpp"
#include "efeo/evaluation.hpp"

namespace py = pybind11;
using namespace efeo;

namespace {

std::shared_ptr<const EnrichedSpace> make_space(const ProblemSpec& p, int n, bool enriched) {
    if (p.dimension() == 1) {
        const Mesh1D mesh = build_uniform_mesh_1d(p.x_domain.lo, p.x_domain.hi, n);
        return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(p, mesh) : build_plain_space(mesh));
    }
    const Mesh2D mesh = build_tensor_mesh_2d(n, n);
    return std::make_shared<const EnrichedSpace>(enriched ? build_enriched_space(p, mesh) : build_plain_space(mesh));
}

ForcingParams forcing_from(const ProblemSpec& p, const std::vector<double>& v) {
    if (p.dimension() == 2) {
        if (v.size() != 6) throw InvalidArgument("square2d forcing needs m0,m1,n0,n1,n2,n3");
        return ForcingParams::two_d(v[0], v[1], v[2], v[3], v[4], v[5]);
    }
    if (v.size() != 4) throw InvalidArgument("1D forcing needs m0,m1,n0,n1");
    return ForcingParams::one_d(v[0], v[1], v[2], v[3], p.cls == ProblemClass::interior1d);
}

/// Oracle solver bundled with its space for Python callers.
struct PyOracle {
    ProblemSpec problem;
    std::shared_ptr<const EnrichedSpace> space;
    std::shared_ptr<OracleSolver> solver;

    PyOracle(const std::string& name, double eps, int mesh_n, bool enriched)
        : problem(ProblemSpec::by_name(name, eps)),
          space(make_space(problem, mesh_n, enriched)),
          solver(std::make_shared<OracleSolver>(problem, space)) {}

    Vector solve(const std::vector<double>& f) const { return solver->solve(forcing_from(problem, f)).coefficients; }
    Vector load(const std::vector<double>& f) const { return solver->loads()(forcing_from(problem, f)); }

    std::vector<double> evaluate(const Vector& coeffs, const std::vector<std::array<double, 2>>& points) const {
        EFEO_REQUIRE(static_cast<std::size_t>(coeffs.size()) == space->total_dim(), "coefficient count mismatch");
        const Solution s{coeffs, space};
        return evaluate_solution(s, points);
    }
};

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["problem"] = r.problem_name;
    d["epsilon"] = r.epsilon;
    d["mode"] = std::string(to_string(r.mode));
    d["mesh_n"] = r.mesh_n;
    d["grid"] = std::string(to_string(r.grid));
    d["mean"] = r.mean;
    d["std"] = r.std;
    d["n_test"] = r.n_test;
    d["per_sample"] = r.per_sample;
    return d;
}

}  // namespace

PYBIND11_MODULE(_efeonet, m) {
    m.doc() = "Enriched FEM operator networks (C++ core)";
    m.attr("__version__") = EFEO_VERSION;

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("swish", &swish);
    m.def(
        "uniform_mesh", [](double a, double b, int n) {
            const Mesh1D mesh = build_uniform_mesh_1d(a, b, n);
            return std::vector<double>(mesh.nodes().begin(), mesh.nodes().end());
        },
        py::arg("a"), py::arg("b"), py::arg("n"));
    m.def(
        "shishkin_mesh",
        [](const std::string& problem, double eps, int n) {
            const ProblemSpec p = ProblemSpec::by_name(problem, eps);
            const Mesh1D mesh = build_shishkin_mesh_1d(p.x_domain.lo, p.x_domain.hi, reference_shishkin_spec(p, n), eps);
            return std::vector<double>(mesh.nodes().begin(), mesh.nodes().end());
        },
        py::arg("problem"), py::arg("epsilon"), py::arg("n"));

    m.def(
        "sample_forcing",
        [](const std::string& problem, std::uint64_t seed, std::uint64_t index, const std::string& purpose) {
            SamplingSpec s;
            s.seed = seed;
            return sample_forcing(s, ProblemSpec::by_name(problem, 1e-3).cls, index, purpose).flat();
        },
        py::arg("problem"), py::arg("seed"), py::arg("index"), py::arg("purpose") = "train");
    m.def(
        "forcing_eval",
        [](const std::string& problem, const std::vector<double>& f, double x, double y) {
            return forcing_eval(forcing_from(ProblemSpec::by_name(problem, 1e-3), f), x, y);
        },
        py::arg("problem"), py::arg("forcing"), py::arg("x"), py::arg("y") = 0.0);
    m.def(
        "discretize_forcing",
        [](const std::string& problem, const std::vector<double>& f, int resolution) {
            const ProblemSpec p = ProblemSpec::by_name(problem, 1e-3);
            return discretize_forcing(forcing_from(p, f), resolution, p.x_domain, p.y_domain);
        },
        py::arg("problem"), py::arg("forcing"), py::arg("resolution") = 201);

    m.def(
        "assemble_matrix",
        [](const std::string& problem, double eps, int mesh_n, bool enriched) {
            const ProblemSpec p = ProblemSpec::by_name(problem, eps);
            return Eigen::MatrixXd(assemble_matrix(p, *make_space(p, mesh_n, enriched)));
        },
        py::arg("problem"), py::arg("epsilon"), py::arg("mesh_n"), py::arg("enriched") = true);
    m.def("solve_direct", [](const Eigen::MatrixXd& a, const Vector& f) { return solve_direct(a, f); });

    py::class_<PyOracle>(m, "Oracle")
        .def(py::init<const std::string&, double, int, bool>(), py::arg("problem"), py::arg("epsilon"),
             py::arg("mesh_n") = 100, py::arg("enriched") = true)
        .def_property_readonly("total_dim", [](const PyOracle& o) { return o.space->total_dim(); })
        .def_property_readonly("matrix", [](const PyOracle& o) { return Eigen::MatrixXd(o.solver->matrix()); })
        .def("solve", &PyOracle::solve, py::arg("forcing"))
        .def("load", &PyOracle::load, py::arg("forcing"))
        .def("evaluate", &PyOracle::evaluate, py::arg("coefficients"), py::arg("points"));

    m.def(
        "shishkin_reference",
        [](const std::string& problem, double eps, const std::vector<double>& f, int n_ref) {
            const ProblemSpec p = ProblemSpec::by_name(problem, eps);
            const GridFunction g = shishkin_reference(p, forcing_from(p, f), n_ref > 0 ? std::optional<int>(n_ref)
                                                                                     : std::nullopt);
            py::dict d;
            d["x"] = std::vector<double>(g.x.nodes().begin(), g.x.nodes().end());
            if (g.y) d["y"] = std::vector<double>(g.y->nodes().begin(), g.y->nodes().end());
            d["values"] = g.values;
            return d;
        },
        py::arg("problem"), py::arg("epsilon"), py::arg("forcing"), py::arg("n_ref") = 0);

    m.def("relative_l2", [](const std::vector<double>& p, const std::vector<double>& r, const std::vector<double>& w) {
        return relative_l2(p, r, w);
    });

    m.def(
        "run_experiment",
        [](const std::string& problem, double eps, const std::string& mode, int mesh_n, int n_test,
           std::uint64_t seed, int n_ref) {
            ExperimentSpec s;
            s.problem_name = problem;
            s.epsilon = eps;
            s.mode = solver_mode_from_string(mode);
            if (s.mode == SolverMode::trained) throw InvalidArgument("use evaluate_checkpoint for trained models");
            s.mesh_n = mesh_n;
            s.n_test = n_test;
            s.seed = seed;
            if (n_ref > 0) s.n_ref = n_ref;
            py::list out;
            for (const ErrorReport& r : run_experiment(s)) out.append(report_dict(r));
            return out;
        },
        py::arg("problem"), py::arg("epsilon"), py::arg("mode") = "oracle", py::arg("mesh_n") = 100,
        py::arg("n_test") = 20, py::arg("seed") = 0, py::arg("n_ref") = 0);

    m.def(
        "train",
        [](const std::string& problem, double eps, int mesh_n, std::vector<int> hidden, int steps, int samples,
           int max_iterations, std::uint64_t seed, const std::string& mode, const std::string& path) {
            const ProblemSpec p = ProblemSpec::by_name(problem, eps);
            const auto space = make_space(p, mesh_n, true);
            const OracleSolver oracle(p, space);
            TrainConfig tc;
            tc.steps = steps;
            tc.samples = samples;
            tc.max_iterations = max_iterations;
            tc.seed = seed;
            tc.mode = sampling_mode_from_string(mode);
            NetworkConfig net;
            net.input_dim = input_dim_for(p, space->total_dim(), tc.encoding, tc.resolution);
            net.output_dim = static_cast<int>(space->total_dim());
            net.hidden = std::move(hidden);
            TrainResult r = [&] {
                py::gil_scoped_release release;
                return train(p, oracle, net, tc);
            }();
            if (!path.empty()) {
                save_checkpoint(r.params, path,
                                {{"problem", problem}, {"epsilon", eps}, {"mesh_n", mesh_n},
                                 {"resolution", tc.resolution}, {"encoding", "forcing_values"},
                                 {"samples", samples}, {"seed", seed}});
            }
            std::vector<double> losses;
            for (const HistoryEntry& h : r.history) losses.push_back(h.loss);
            py::dict d;
            d["losses"] = losses;
            d["parameters"] = r.params.values;
            d["network"] = r.params.config.describe();
            return d;
        },
        py::arg("problem"), py::arg("epsilon"), py::arg("mesh_n") = 100, py::arg("hidden") = std::vector<int>{64, 64},
        py::arg("steps") = 10, py::arg("samples") = 64, py::arg("max_iterations") = 100, py::arg("seed") = 0,
        py::arg("mode") = "online", py::arg("checkpoint") = "");

    m.def(
        "evaluate_checkpoint",
        [](const std::string& path, int n_test, std::uint64_t seed) {
            const Checkpoint ck = load_checkpoint(path);
            const auto& meta = ck.metadata;
            ExperimentSpec s;
            s.problem_name = meta.at("problem").get<std::string>();
            s.epsilon = meta.at("epsilon").get<double>();
            s.mesh_n = meta.at("mesh_n").get<int>();
            s.mode = SolverMode::trained;
            s.n_test = n_test;
            s.seed = seed;
            s.model = std::make_shared<const CoefficientModel>(
                ck.params, encoding_from_string(meta.value("encoding", std::string("forcing_values"))),
                meta.at("resolution").get<int>(), s.problem());
            py::list out;
            for (const ErrorReport& r : run_experiment(s)) out.append(report_dict(r));
            return out;
        },
        py::arg("checkpoint"), py::arg("n_test") = 20, py::arg("seed") = 0);
}
