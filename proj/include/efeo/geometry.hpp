#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace efeo {

/// Strictly increasing 1D node set a = x_0 < x_1 < ... < x_n = b.
class Mesh1D {
public:
    Mesh1D() = default;
    /// Validates monotonicity; throws InvalidArgument otherwise.
    explicit Mesh1D(std::vector<double> nodes);

    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t element_count() const { return nodes_.size() - 1; }
    /// Number of nodes that are not Dirichlet boundary points.
    std::size_t interior_count() const { return nodes_.size() - 2; }

    double left() const { return nodes_.front(); }
    double right() const { return nodes_.back(); }
    double length() const { return right() - left(); }
    double width(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
    double max_width() const;

    std::size_t first_boundary_index() const { return 0; }
    std::size_t last_boundary_index() const { return nodes_.size() - 1; }

    /// Element containing x. Shared nodes resolve to the element on their left,
    /// except the left endpoint which belongs to element 0.
    /// Throws InvalidArgument for points outside [left, right].
    std::size_t locate(double x) const;

private:
    std::vector<double> nodes_;
};

enum class LayerSide { left, right, both, interior };

struct ShishkinSpec {
    int n = 8192;          ///< element count (even; divisible by 4 for both/interior)
    double sigma = 2.0;    ///< mesh constant
    double beta = 1.0;     ///< lower bound of |b| next to the layer
    LayerSide side = LayerSide::right;
    double center = 0.0;   ///< layer location for LayerSide::interior
};

struct ShishkinTransition {
    double tau = 0.0;      ///< fine-band width per layer
    bool clamped = false;  ///< true when tau hit its upper bound (mesh is uniform)
};

/// Fine-band width: min(L/2, sigma*eps/beta*ln n) for boundary layers (L/4
/// when both sides carry layers) and min(L/4, sigma*sqrt(eps)*ln n) for
/// interior layers, whose width scales with sqrt(eps).
ShishkinTransition shishkin_transition(double a, double b, const ShishkinSpec& spec, double eps);

Mesh1D build_uniform_mesh_1d(double a, double b, int n);

/// Piecewise-uniform layer-adapted mesh. Boundary layers put n/2 elements in
/// the band of width tau; both-sided layers use n/4 per band; interior layers
/// put n/2 elements in [center - tau, center + tau] and n/4 on each side.
Mesh1D build_shishkin_mesh_1d(double a, double b, const ShishkinSpec& spec, double eps);

/// Tensor-product Q1 mesh. Nodes with grid position (i, j), 0 < i < nx,
/// 0 < j < ny carry unknown (j - 1) * (nx - 1) + (i - 1); boundary nodes carry none.
class Mesh2D {
public:
    Mesh2D(Mesh1D x, Mesh1D y);

    const Mesh1D& x() const { return x_; }
    const Mesh1D& y() const { return y_; }
    std::size_t nx() const { return x_.element_count(); }
    std::size_t ny() const { return y_.element_count(); }
    std::size_t interior_count() const { return x_.interior_count() * y_.interior_count(); }
    std::size_t cell_count() const { return nx() * ny(); }

    /// Unknown index of grid node (i, j), or nullopt on the boundary.
    std::optional<std::size_t> interior_node_index(std::size_t i, std::size_t j) const;

private:
    Mesh1D x_;
    Mesh1D y_;
};

/// nx, ny are element counts on [0, 1]. Optional coordinate arrays must be
/// strictly increasing, span [0, 1] and carry n + 1 entries.
Mesh2D build_tensor_mesh_2d(int nx, int ny,
                            std::optional<std::vector<double>> x_nodes = std::nullopt,
                            std::optional<std::vector<double>> y_nodes = std::nullopt);

/// One coordinate per line.
void write_mesh_csv(const Mesh1D& mesh, const std::string& path);
/// Axis label and coordinate per line ("x,<value>" then "y,<value>").
void write_mesh_csv(const Mesh2D& mesh, const std::string& path);

}  // namespace efeo
