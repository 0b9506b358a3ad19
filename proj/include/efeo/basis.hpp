#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "efeo/geometry.hpp"
#include "efeo/problem.hpp"

namespace efeo {

using Point = std::array<double, 2>;  ///< y is ignored for 1D spaces

struct ScalarEval {
    double value = 0.0;
    double deriv = 0.0;
};

struct BasisValue {
    double value = 0.0;
    std::array<double, 2> grad{0.0, 0.0};
};

enum class Side { left, right };

/// exp(-rate * distance to the layer side).
struct BoundaryExp {
    Side side = Side::right;
    double rate = 1.0;
};

/// erf(scale * (x - center)).
struct InteriorErf {
    double center = 0.0;
    double scale = 1.0;
};

using CorrectorKind = std::variant<BoundaryExp, InteriorErf>;

/// exp(arg) that returns exactly 0 for arg <= -745 instead of a denormal.
double safe_exp(double arg);

/// Layer profile minus the linear interpolant of its endpoint values:
///   c(x) = raw(x) - [(1 - s) raw(a) + s raw(b)],  s = (x - a) / (b - a),
/// so c(a) = c(b) = 0 exactly.
class Corrector1D {
public:
    Corrector1D(CorrectorKind kind, Interval domain);

    const CorrectorKind& kind() const { return kind_; }
    const Interval& domain() const { return domain_; }

    ScalarEval eval(double x) const;
    ScalarEval raw(double x) const;
    double raw_left() const { return raw_left_; }
    double raw_right() const { return raw_right_; }
    /// Slope of the subtracted linear blend.
    double blend_slope() const { return (raw_right_ - raw_left_) / domain_.length(); }
    /// Point the profile concentrates around, and its length scale.
    double layer_point() const;
    double layer_scale() const;

private:
    CorrectorKind kind_;
    Interval domain_;
    double raw_left_ = 0.0;
    double raw_right_ = 0.0;
};

Corrector1D make_corrector(const CorrectorKind& kind, Interval domain);

/// P1 hat of node `node` (0 < node < n) on `mesh`.
ScalarEval hat_eval(const Mesh1D& mesh, std::size_t node, double x);

/// 1D function family on one axis: correctors first, then the interior hats
/// in node order. Family index k >= corrector_count() is the hat of node
/// k - corrector_count() + 1.
class AxisBasis {
public:
    AxisBasis(Mesh1D mesh, std::vector<Corrector1D> correctors);

    const Mesh1D& mesh() const { return mesh_; }
    std::size_t size() const { return correctors_.size() + mesh_.interior_count(); }
    std::size_t corrector_count() const { return correctors_.size(); }
    std::size_t hat_count() const { return mesh_.interior_count(); }
    bool is_corrector(std::size_t k) const { return k < correctors_.size(); }
    const Corrector1D& corrector(std::size_t k) const { return correctors_[k]; }
    std::size_t hat_node(std::size_t k) const { return k - correctors_.size() + 1; }
    std::size_t hat_index(std::size_t node) const { return node - 1 + correctors_.size(); }

    ScalarEval eval(std::size_t k, double x) const;
    /// Elements [first, last) on which member k can be nonzero.
    std::pair<std::size_t, std::size_t> support(std::size_t k) const;

private:
    Mesh1D mesh_;
    std::vector<Corrector1D> correctors_;
};

/// Global basis function as a product of one member per axis (2D only).
struct TensorIndex {
    std::size_t fx = 0;
    std::size_t fy = 0;
};

/// Nodal basis plus correctors. Global ordering puts every corrector before
/// the nodal functions, matching the coefficient layout of solutions and
/// network outputs.
class EnrichedSpace {
public:
    static EnrichedSpace one_d(AxisBasis axis);
    /// Tensor space over two axis families. Correctors are ordered
    /// (e_x, hat_j) for each interior y node, (hat_i, e_y) for each interior x
    /// node, then (e_x, e_y); each axis may carry zero or one profile.
    static EnrichedSpace two_d(AxisBasis x_axis, AxisBasis y_axis);

    int dimension() const { return dimension_; }
    std::size_t total_dim() const { return corrector_count_ + nodal_count_; }
    std::size_t nodal_count() const { return nodal_count_; }
    std::size_t corrector_count() const { return corrector_count_; }

    const AxisBasis& x_axis() const { return axes_[0]; }
    const AxisBasis& y_axis() const { return axes_[1]; }
    /// Axis factors of global function k (2D).
    TensorIndex factors(std::size_t k) const { return pairs_[k]; }

    bool contains(const Point& p) const;
    /// Evaluates global function k; throws InvalidArgument outside the domain.
    BasisValue eval(std::size_t k, const Point& p) const;
    BasisValue nodal_eval(std::size_t k, const Point& p) const;
    BasisValue corrector_eval(std::size_t k, const Point& p) const;

    /// sum_k coeffs[k] * phi_k(p) and its gradient.
    BasisValue combine(std::span<const double> coeffs, const Point& p) const;

private:
    int dimension_ = 1;
    std::size_t nodal_count_ = 0;
    std::size_t corrector_count_ = 0;
    std::vector<AxisBasis> axes_;
    std::vector<TensorIndex> pairs_;
};

/// Correctors prescribed by the problem class: one exp or erf profile in 1D,
/// the 2(n-1) + 1 edge/corner tensor family in 2D.
EnrichedSpace build_enriched_space(const ProblemSpec& problem, const Mesh1D& mesh);
EnrichedSpace build_enriched_space(const ProblemSpec& problem, const Mesh2D& mesh);

/// Same meshes without correctors (standard Galerkin).
EnrichedSpace build_plain_space(const Mesh1D& mesh);
EnrichedSpace build_plain_space(const Mesh2D& mesh);

/// Corrector descriptors of a 1D problem, or of one axis of the square problem.
CorrectorKind corrector_kind_for(const ProblemSpec& problem, int axis = 0);

/// Writes "x,value" rows of family member k sampled at `resolution` points.
void write_basis_csv(const AxisBasis& axis, std::size_t k, int resolution, const std::string& path);

}  // namespace efeo
