#include "efeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "efeo/error.hpp"

namespace efeo {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    EFEO_REQUIRE(nodes_.size() >= 2, "Mesh1D: need at least two nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        EFEO_REQUIRE(std::isfinite(nodes_[i]) && nodes_[i + 1] > nodes_[i],
                     "Mesh1D: nodes must be finite and strictly increasing (index " +
                         std::to_string(i) + ")");
    }
}

double Mesh1D::max_width() const {
    double h = 0.0;
    for (std::size_t e = 0; e < element_count(); ++e) h = std::max(h, width(e));
    return h;
}

std::size_t Mesh1D::locate(double x) const {
    if (!(x >= left() && x <= right())) {
        throw InvalidArgument("Mesh1D::locate: point " + std::to_string(x) + " outside [" +
                              std::to_string(left()) + ", " + std::to_string(right()) + "]");
    }
    // First node >= x; a point on node k > 0 belongs to element k - 1.
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    return k == 0 ? 0 : k - 1;
}

namespace {

void append_uniform(std::vector<double>& nodes, double a, double b, int n) {
    // Appends n elements on [a, b]; the first node a is assumed present.
    for (int i = 1; i < n; ++i) nodes.push_back(a + (b - a) * static_cast<double>(i) / n);
    nodes.push_back(b);
}

}  // namespace

Mesh1D build_uniform_mesh_1d(double a, double b, int n) {
    EFEO_REQUIRE(a < b, "build_uniform_mesh_1d: need a < b");
    EFEO_REQUIRE(n >= 2, "build_uniform_mesh_1d: need n >= 2");
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(n) + 1);
    nodes.push_back(a);
    append_uniform(nodes, a, b, n);
    return Mesh1D(std::move(nodes));
}

ShishkinTransition shishkin_transition(double a, double b, const ShishkinSpec& spec, double eps) {
    EFEO_REQUIRE(eps > 0.0, "shishkin: eps must be > 0");
    EFEO_REQUIRE(a < b, "shishkin: need a < b");
    EFEO_REQUIRE(spec.n >= 4 && spec.n % 2 == 0, "shishkin: n must be even and >= 4");
    EFEO_REQUIRE(spec.sigma > 0.0 && spec.beta > 0.0, "shishkin: sigma and beta must be > 0");
    const double length = b - a;
    const double log_n = std::log(static_cast<double>(spec.n));
    double bound = 0.5 * length;
    double tau = 0.0;
    switch (spec.side) {
        case LayerSide::left:
        case LayerSide::right: tau = spec.sigma * eps / spec.beta * log_n; break;
        case LayerSide::both:
            bound = 0.25 * length;
            tau = spec.sigma * eps / spec.beta * log_n;
            break;
        case LayerSide::interior:
            bound = 0.25 * length;
            tau = spec.sigma * std::sqrt(eps) * log_n;
            break;
    }
    if (tau >= bound) return {bound, true};
    return {tau, false};
}

Mesh1D build_shishkin_mesh_1d(double a, double b, const ShishkinSpec& spec, double eps) {
    const ShishkinTransition t = shishkin_transition(a, b, spec, eps);
    const int n = spec.n;
    if (spec.side == LayerSide::both || spec.side == LayerSide::interior) {
        EFEO_REQUIRE(n % 4 == 0, "shishkin: n must be divisible by 4 for two-band meshes");
    }
    if (t.clamped) return build_uniform_mesh_1d(a, b, n);

    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(n) + 1);
    nodes.push_back(a);
    switch (spec.side) {
        case LayerSide::left:
            append_uniform(nodes, a, a + t.tau, n / 2);
            append_uniform(nodes, a + t.tau, b, n / 2);
            break;
        case LayerSide::right:
            append_uniform(nodes, a, b - t.tau, n / 2);
            append_uniform(nodes, b - t.tau, b, n / 2);
            break;
        case LayerSide::both:
            append_uniform(nodes, a, a + t.tau, n / 4);
            append_uniform(nodes, a + t.tau, b - t.tau, n / 2);
            append_uniform(nodes, b - t.tau, b, n / 4);
            break;
        case LayerSide::interior: {
            const double lo = spec.center - t.tau;
            const double hi = spec.center + t.tau;
            EFEO_REQUIRE(lo > a && hi < b, "shishkin: interior band leaves the domain");
            append_uniform(nodes, a, lo, n / 4);
            append_uniform(nodes, lo, hi, n / 2);
            append_uniform(nodes, hi, b, n / 4);
            break;
        }
    }
    return Mesh1D(std::move(nodes));
}

Mesh2D::Mesh2D(Mesh1D x, Mesh1D y) : x_(std::move(x)), y_(std::move(y)) {}

std::optional<std::size_t> Mesh2D::interior_node_index(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0 || i >= nx() || j >= ny()) return std::nullopt;
    return (j - 1) * (nx() - 1) + (i - 1);
}

namespace {

Mesh1D axis_mesh(int n, std::optional<std::vector<double>> coords, const char* axis) {
    EFEO_REQUIRE(n >= 2, std::string("build_tensor_mesh_2d: n") + axis + " must be >= 2");
    if (!coords) return build_uniform_mesh_1d(0.0, 1.0, n);
    EFEO_REQUIRE(coords->size() == static_cast<std::size_t>(n) + 1,
                 std::string("build_tensor_mesh_2d: ") + axis + "_nodes must have n + 1 entries");
    EFEO_REQUIRE(coords->front() == 0.0 && coords->back() == 1.0,
                 std::string("build_tensor_mesh_2d: ") + axis + "_nodes must span [0, 1]");
    return Mesh1D(std::move(*coords));
}

}  // namespace

Mesh2D build_tensor_mesh_2d(int nx, int ny, std::optional<std::vector<double>> x_nodes,
                            std::optional<std::vector<double>> y_nodes) {
    return Mesh2D(axis_mesh(nx, std::move(x_nodes), "x"), axis_mesh(ny, std::move(y_nodes), "y"));
}

void write_mesh_csv(const Mesh1D& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh CSV: " + path);
    out << std::setprecision(17);
    for (double x : mesh.nodes()) out << x << '\n';
}

void write_mesh_csv(const Mesh2D& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh CSV: " + path);
    out << std::setprecision(17);
    for (double x : mesh.x().nodes()) out << "x," << x << '\n';
    for (double y : mesh.y().nodes()) out << "y," << y << '\n';
}

}  // namespace efeo
