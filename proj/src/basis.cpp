#include "efeo/basis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <string>

#include "efeo/error.hpp"

namespace efeo {

double safe_exp(double arg) { return arg <= -745.0 ? 0.0 : std::exp(arg); }

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Corrector1D::Corrector1D(CorrectorKind kind, Interval domain) : kind_(kind), domain_(domain) {
    EFEO_REQUIRE(domain_.lo < domain_.hi, "corrector: empty domain");
    std::visit(Overloaded{
                   [](const BoundaryExp& e) {
                       EFEO_REQUIRE(std::isfinite(e.rate) && e.rate > 0.0, "corrector: rate must be > 0");
                   },
                   [&](const InteriorErf& e) {
                       EFEO_REQUIRE(std::isfinite(e.scale) && e.scale > 0.0, "corrector: scale must be > 0");
                       EFEO_REQUIRE(domain_.contains(e.center), "corrector: erf center outside domain");
                   },
               },
               kind_);
    raw_left_ = raw(domain_.lo).value;
    raw_right_ = raw(domain_.hi).value;
}

ScalarEval Corrector1D::raw(double x) const {
    return std::visit(Overloaded{
                          [&](const BoundaryExp& e) -> ScalarEval {
                              if (e.side == Side::right) {
                                  const double v = safe_exp(-e.rate * (domain_.hi - x));
                                  return {v, e.rate * v};
                              }
                              const double v = safe_exp(-e.rate * (x - domain_.lo));
                              return {v, -e.rate * v};
                          },
                          [&](const InteriorErf& e) -> ScalarEval {
                              const double t = e.scale * (x - e.center);
                              return {std::erf(t), 2.0 * e.scale * std::numbers::inv_sqrtpi * safe_exp(-t * t)};
                          },
                      },
                      kind_);
}

ScalarEval Corrector1D::eval(double x) const {
    EFEO_REQUIRE(domain_.contains(x), "corrector_eval: point " + std::to_string(x) + " outside domain");
    const ScalarEval r = raw(x);
    const double s = (x - domain_.lo) / domain_.length();
    return {r.value - ((1.0 - s) * raw_left_ + s * raw_right_), r.deriv - blend_slope()};
}

double Corrector1D::layer_point() const {
    return std::visit(Overloaded{
                          [&](const BoundaryExp& e) { return e.side == Side::right ? domain_.hi : domain_.lo; },
                          [](const InteriorErf& e) { return e.center; },
                      },
                      kind_);
}

double Corrector1D::layer_scale() const {
    return std::visit(Overloaded{
                          [](const BoundaryExp& e) { return 1.0 / e.rate; },
                          [](const InteriorErf& e) { return 1.0 / e.scale; },
                      },
                      kind_);
}

Corrector1D make_corrector(const CorrectorKind& kind, Interval domain) { return Corrector1D(kind, domain); }

ScalarEval hat_eval(const Mesh1D& mesh, std::size_t node, double x) {
    EFEO_REQUIRE(node > 0 && node + 1 < mesh.node_count(), "hat_eval: node is not interior");
    const std::size_t e = mesh.locate(x);
    if (e + 1 == node) {
        const double h = mesh.width(e);
        return {(x - mesh.node(e)) / h, 1.0 / h};
    }
    if (e == node) {
        const double h = mesh.width(e);
        return {(mesh.node(e + 1) - x) / h, -1.0 / h};
    }
    return {0.0, 0.0};
}

AxisBasis::AxisBasis(Mesh1D mesh, std::vector<Corrector1D> correctors)
    : mesh_(std::move(mesh)), correctors_(std::move(correctors)) {
    EFEO_REQUIRE(mesh_.element_count() >= 2, "AxisBasis: mesh needs at least two elements");
    for (const auto& c : correctors_) {
        EFEO_REQUIRE(std::abs(c.domain().lo - mesh_.left()) <= 1e-12 &&
                         std::abs(c.domain().hi - mesh_.right()) <= 1e-12,
                     "AxisBasis: corrector domain differs from the mesh");
    }
}

ScalarEval AxisBasis::eval(std::size_t k, double x) const {
    EFEO_REQUIRE(k < size(), "AxisBasis::eval: index out of range");
    if (is_corrector(k)) return correctors_[k].eval(x);
    return hat_eval(mesh_, hat_node(k), x);
}

std::pair<std::size_t, std::size_t> AxisBasis::support(std::size_t k) const {
    if (is_corrector(k)) return {0, mesh_.element_count()};
    const std::size_t node = hat_node(k);
    return {node - 1, node + 1};
}

EnrichedSpace EnrichedSpace::one_d(AxisBasis axis) {
    EnrichedSpace s;
    s.dimension_ = 1;
    s.nodal_count_ = axis.hat_count();
    s.corrector_count_ = axis.corrector_count();
    s.axes_.push_back(std::move(axis));
    return s;
}

EnrichedSpace EnrichedSpace::two_d(AxisBasis x_axis, AxisBasis y_axis) {
    EFEO_REQUIRE(x_axis.corrector_count() <= 1 && y_axis.corrector_count() <= 1,
                 "EnrichedSpace::two_d: at most one profile per axis");
    EnrichedSpace s;
    s.dimension_ = 2;
    const std::size_t cx = x_axis.corrector_count();
    const std::size_t cy = y_axis.corrector_count();
    const std::size_t hx = x_axis.hat_count();
    const std::size_t hy = y_axis.hat_count();
    if (cx == 1) {
        for (std::size_t j = 0; j < hy; ++j) s.pairs_.push_back({0, cy + j});
    }
    if (cy == 1) {
        for (std::size_t i = 0; i < hx; ++i) s.pairs_.push_back({cx + i, 0});
    }
    if (cx == 1 && cy == 1) s.pairs_.push_back({0, 0});
    s.corrector_count_ = s.pairs_.size();
    for (std::size_t j = 0; j < hy; ++j) {
        for (std::size_t i = 0; i < hx; ++i) s.pairs_.push_back({cx + i, cy + j});
    }
    s.nodal_count_ = hx * hy;
    s.axes_.push_back(std::move(x_axis));
    s.axes_.push_back(std::move(y_axis));
    return s;
}

bool EnrichedSpace::contains(const Point& p) const {
    const Mesh1D& mx = axes_[0].mesh();
    if (!(p[0] >= mx.left() && p[0] <= mx.right())) return false;
    if (dimension_ == 1) return true;
    const Mesh1D& my = axes_[1].mesh();
    return p[1] >= my.left() && p[1] <= my.right();
}

BasisValue EnrichedSpace::eval(std::size_t k, const Point& p) const {
    EFEO_REQUIRE(k < total_dim(), "EnrichedSpace::eval: index out of range");
    EFEO_REQUIRE(contains(p), "EnrichedSpace::eval: point outside the domain");
    if (dimension_ == 1) {
        const ScalarEval v = axes_[0].eval(k, p[0]);
        return {v.value, {v.deriv, 0.0}};
    }
    const TensorIndex t = pairs_[k];
    const ScalarEval vx = axes_[0].eval(t.fx, p[0]);
    const ScalarEval vy = axes_[1].eval(t.fy, p[1]);
    return {vx.value * vy.value, {vx.deriv * vy.value, vx.value * vy.deriv}};
}

BasisValue EnrichedSpace::nodal_eval(std::size_t k, const Point& p) const {
    EFEO_REQUIRE(k < nodal_count_, "nodal_eval: index out of range");
    return eval(corrector_count_ + k, p);
}

BasisValue EnrichedSpace::corrector_eval(std::size_t k, const Point& p) const {
    EFEO_REQUIRE(k < corrector_count_, "corrector_eval: index out of range");
    return eval(k, p);
}

BasisValue EnrichedSpace::combine(std::span<const double> coeffs, const Point& p) const {
    EFEO_REQUIRE(coeffs.size() == total_dim(), "combine: coefficient count mismatch");
    EFEO_REQUIRE(contains(p), "combine: point outside the domain");
    BasisValue out;
    if (dimension_ == 1) {
        const AxisBasis& ax = axes_[0];
        for (std::size_t k = 0; k < ax.corrector_count(); ++k) {
            const ScalarEval v = ax.corrector(k).eval(p[0]);
            out.value += coeffs[k] * v.value;
            out.grad[0] += coeffs[k] * v.deriv;
        }
        const std::size_t e = ax.mesh().locate(p[0]);
        for (std::size_t node : {e, e + 1}) {
            if (node == 0 || node + 1 == ax.mesh().node_count()) continue;
            const std::size_t k = ax.hat_index(node);
            const ScalarEval v = hat_eval(ax.mesh(), node, p[0]);
            out.value += coeffs[k] * v.value;
            out.grad[0] += coeffs[k] * v.deriv;
        }
        return out;
    }
    std::vector<ScalarEval> vx(axes_[0].size());
    std::vector<ScalarEval> vy(axes_[1].size());
    for (std::size_t k = 0; k < vx.size(); ++k) vx[k] = axes_[0].eval(k, p[0]);
    for (std::size_t k = 0; k < vy.size(); ++k) vy[k] = axes_[1].eval(k, p[1]);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const ScalarEval& a = vx[pairs_[k].fx];
        const ScalarEval& b = vy[pairs_[k].fy];
        if (a.value == 0.0 && a.deriv == 0.0) continue;
        if (b.value == 0.0 && b.deriv == 0.0) continue;
        out.value += coeffs[k] * a.value * b.value;
        out.grad[0] += coeffs[k] * a.deriv * b.value;
        out.grad[1] += coeffs[k] * a.value * b.deriv;
    }
    return out;
}

namespace {

CorrectorKind exp_for_field(double b_lo, double b_hi, double eps) {
    // Outflow boundary carries the layer: b > 0 pushes it right, b < 0 left.
    if (b_lo > 0.0 && b_hi > 0.0) return BoundaryExp{Side::right, std::abs(b_hi) / eps};
    if (b_lo < 0.0 && b_hi < 0.0) return BoundaryExp{Side::left, std::abs(b_lo) / eps};
    throw InvalidArgument("corrector: convection changes sign; no boundary-layer corrector");
}

}  // namespace

CorrectorKind corrector_kind_for(const ProblemSpec& problem, int axis) {
    problem.validate();
    const double eps = problem.epsilon;
    if (problem.convection == ConvectionKind::none) return BoundaryExp{Side::right, 1.0 / eps};
    switch (problem.cls) {
        case ProblemClass::boundary1d: {
            const Affine b = problem.convection_1d();
            return exp_for_field(b(problem.x_domain.lo), b(problem.x_domain.hi), eps);
        }
        case ProblemClass::interior1d: {
            const Affine b = problem.convection_1d();
            // -eps u'' + b u' with b(x) = -b'(0) x: layer width sqrt(2 eps / b'(0)).
            EFEO_REQUIRE(b.slope < 0.0, "corrector: turning point needs b decreasing through zero");
            return InteriorErf{-b.offset / b.slope, std::sqrt(-b.slope / (2.0 * eps))};
        }
        case ProblemClass::square2d: {
            EFEO_REQUIRE(axis == 0 || axis == 1, "corrector: axis must be 0 or 1");
            const double b = problem.convection_2d()[static_cast<std::size_t>(axis)];
            return exp_for_field(b, b, eps);
        }
    }
    throw InvalidArgument("corrector: unknown problem class");
}

EnrichedSpace build_enriched_space(const ProblemSpec& problem, const Mesh1D& mesh) {
    problem.validate();
    EFEO_REQUIRE(problem.dimension() == 1, "build_enriched_space: 1D mesh given for a 2D problem");
    EFEO_REQUIRE(std::abs(mesh.left() - problem.x_domain.lo) <= 1e-12 &&
                     std::abs(mesh.right() - problem.x_domain.hi) <= 1e-12,
                 "build_enriched_space: mesh does not cover the problem domain");
    std::vector<Corrector1D> correctors{make_corrector(corrector_kind_for(problem), problem.x_domain)};
    return EnrichedSpace::one_d(AxisBasis(mesh, std::move(correctors)));
}

EnrichedSpace build_enriched_space(const ProblemSpec& problem, const Mesh2D& mesh) {
    problem.validate();
    EFEO_REQUIRE(problem.dimension() == 2, "build_enriched_space: 2D mesh given for a 1D problem");
    std::vector<Corrector1D> cx{make_corrector(corrector_kind_for(problem, 0), problem.x_domain)};
    std::vector<Corrector1D> cy{make_corrector(corrector_kind_for(problem, 1), problem.y_domain)};
    return EnrichedSpace::two_d(AxisBasis(mesh.x(), std::move(cx)), AxisBasis(mesh.y(), std::move(cy)));
}

EnrichedSpace build_plain_space(const Mesh1D& mesh) { return EnrichedSpace::one_d(AxisBasis(mesh, {})); }

EnrichedSpace build_plain_space(const Mesh2D& mesh) {
    return EnrichedSpace::two_d(AxisBasis(mesh.x(), {}), AxisBasis(mesh.y(), {}));
}

void write_basis_csv(const AxisBasis& axis, std::size_t k, int resolution, const std::string& path) {
    EFEO_REQUIRE(resolution >= 2, "write_basis_csv: resolution must be >= 2");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write basis CSV: " + path);
    out << std::setprecision(17) << "x,value\n";
    const double a = axis.mesh().left();
    const double b = axis.mesh().right();
    for (int i = 0; i < resolution; ++i) {
        const double x = i + 1 == resolution ? b : a + (b - a) * i / (resolution - 1);
        out << x << ',' << axis.eval(k, x).value << '\n';
    }
}

}  // namespace efeo
