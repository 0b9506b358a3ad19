#include "efeo/assembly.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <string>

#include "corrector_integrals.hpp"
#include "efeo/error.hpp"

namespace efeo {

using detail::Poly;

namespace {

struct Entry3 {
    double mass = 0.0;
    double stiffness = 0.0;
    double convection = 0.0;
};

/// Quadrature route for one (test i, trial k) pair over [p, q].
Entry3 quadrature_entry(const AxisBasis& axis, std::size_t i, std::size_t k, Affine w, double p, double q,
                        const LayerQuadratureOptions& opt) {
    std::vector<double> layers;
    double scale = 0.0;
    for (std::size_t j : {i, k}) {
        if (axis.is_corrector(j)) {
            layers.push_back(axis.corrector(j).layer_point());
            scale = scale == 0.0 ? axis.corrector(j).layer_scale() : std::min(scale, axis.corrector(j).layer_scale());
        }
    }
    // Midpoint evaluation keeps hats on the element they were requested for.
    auto value = [&](std::size_t j, double x) { return axis.eval(j, x); };
    Entry3 out;
    out.mass = layer_quadrature([&](double x) { return value(k, x).value * value(i, x).value; }, p, q, layers,
                                scale, opt)
                   .value;
    out.stiffness = layer_quadrature([&](double x) { return value(k, x).deriv * value(i, x).deriv; }, p, q,
                                     layers, scale, opt)
                        .value;
    out.convection = layer_quadrature([&](double x) { return w(x) * value(k, x).deriv * value(i, x).value; }, p,
                                      q, layers, scale, opt)
                         .value;
    return out;
}

void add_hat_hat(const Mesh1D& mesh, std::size_t offset, Affine w, AxisGram& g) {
    const std::size_t n_nodes = mesh.node_count();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double h = mesh.width(e);
        const Poly wl = Poly::linear(w(mesh.node(e)), w.slope);
        const std::array<Poly, 2> phi{Poly::linear(1.0, -1.0 / h), Poly::linear(0.0, 1.0 / h)};
        const std::array<double, 2> dphi{-1.0 / h, 1.0 / h};
        const std::array<std::size_t, 2> nodes{e, e + 1};
        for (int a = 0; a < 2; ++a) {
            if (nodes[a] == 0 || nodes[a] + 1 == n_nodes) continue;
            const std::size_t row = offset + nodes[a] - 1;
            const double w_phi = detail::poly_integral(wl * phi[a], 0.0, h);
            for (int b = 0; b < 2; ++b) {
                if (nodes[b] == 0 || nodes[b] + 1 == n_nodes) continue;
                const std::size_t col = offset + nodes[b] - 1;
                g.mass(row, col) += detail::poly_integral(phi[a] * phi[b], 0.0, h);
                g.stiffness(row, col) += dphi[a] * dphi[b] * h;
                g.convection(row, col) += dphi[b] * w_phi;
            }
        }
    }
}

void add_corrector_hat_closed(const AxisBasis& axis, std::size_t ci, Affine w, AxisGram& g) {
    const Corrector1D& c = axis.corrector(ci);
    const Mesh1D& mesh = axis.mesh();
    const std::size_t n_nodes = mesh.node_count();
    const double m = c.blend_slope();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double p = mesh.node(e);
        const double q = mesh.node(e + 1);
        const double h = q - p;
        const Poly wl = Poly::linear(w(p), w.slope);
        const Poly ell = detail::blend_local(c, p);
        const std::array<Poly, 2> phi{Poly::linear(1.0, -1.0 / h), Poly::linear(0.0, 1.0 / h)};
        const std::array<double, 2> dphi{-1.0 / h, 1.0 / h};
        const std::array<std::size_t, 2> nodes{e, e + 1};
        const double dc = c.eval(q).value - c.eval(p).value;
        // int w c over the element, needed by every hat trial column
        const double w_c = detail::raw_moment(c, wl, p, q) - detail::poly_integral(wl * ell, 0.0, h);
        for (int a = 0; a < 2; ++a) {
            if (nodes[a] == 0 || nodes[a] + 1 == n_nodes) continue;
            const std::size_t hk = axis.hat_index(nodes[a]);
            const double mass = detail::raw_moment(c, phi[a], p, q) - detail::poly_integral(phi[a] * ell, 0.0, h);
            g.mass(hk, ci) += mass;
            g.mass(ci, hk) += mass;
            g.stiffness(hk, ci) += dphi[a] * dc;
            g.stiffness(ci, hk) += dphi[a] * dc;
            // test hat, trial corrector: int w c' phi
            g.convection(hk, ci) += detail::raw_deriv_moment(c, wl * phi[a], p, q) -
                                    m * detail::poly_integral(wl * phi[a], 0.0, h);
            // test corrector, trial hat: int w phi' c
            g.convection(ci, hk) += dphi[a] * w_c;
        }
    }
}

void add_corrector_corrector_closed(const AxisBasis& axis, std::size_t ci, Affine w, AxisGram& g,
                                    const AssemblyOptions& options) {
    const Corrector1D& c = axis.corrector(ci);
    const double p = c.domain().lo;
    const double q = c.domain().hi;
    const double len = q - p;
    const double m = c.blend_slope();
    const Poly one = Poly::constant(1.0);
    const Poly wl = Poly::linear(w(p), w.slope);
    const Poly ell = detail::blend_local(c, p);

    g.stiffness(ci, ci) = detail::raw_deriv_sq(c, p, q) - 2.0 * m * (c.raw_right() - c.raw_left()) + m * m * len;
    g.convection(ci, ci) = detail::raw_deriv_raw_moment(c, wl, p, q) - detail::raw_deriv_moment(c, wl * ell, p, q) -
                           m * detail::raw_moment(c, wl, p, q) + m * detail::poly_integral(wl * ell, 0.0, len);
    if (detail::is_exp(c)) {
        g.mass(ci, ci) = detail::raw_sq_moment(c, one, p, q) - 2.0 * detail::raw_moment(c, ell, p, q) +
                         detail::poly_integral(ell * ell, 0.0, len);
    } else {
        // erf^2 has no elementary primitive
        g.mass(ci, ci) = quadrature_entry(axis, ci, ci, w, p, q, options.quadrature).mass;
    }
}

}  // namespace

AxisGram assemble_axis_gram(const AxisBasis& axis, Affine weight, const AssemblyOptions& options) {
    const auto n = static_cast<Eigen::Index>(axis.size());
    AxisGram g{DenseMatrix::Zero(n, n), DenseMatrix::Zero(n, n), DenseMatrix::Zero(n, n)};
    add_hat_hat(axis.mesh(), axis.corrector_count(), weight, g);
    const Mesh1D& mesh = axis.mesh();
    for (std::size_t ci = 0; ci < axis.corrector_count(); ++ci) {
        if (options.route == IntegrationRoute::closed_form) {
            add_corrector_hat_closed(axis, ci, weight, g);
            add_corrector_corrector_closed(axis, ci, weight, g, options);
        } else {
            for (std::size_t e = 0; e < mesh.element_count(); ++e) {
                for (std::size_t node : {e, e + 1}) {
                    if (node == 0 || node + 1 == mesh.node_count()) continue;
                    const std::size_t hk = axis.hat_index(node);
                    const double p = mesh.node(e);
                    const double q = mesh.node(e + 1);
                    const Entry3 hc = quadrature_entry(axis, hk, ci, weight, p, q, options.quadrature);
                    const Entry3 ch = quadrature_entry(axis, ci, hk, weight, p, q, options.quadrature);
                    g.mass(hk, ci) += hc.mass;
                    g.mass(ci, hk) += ch.mass;
                    g.stiffness(hk, ci) += hc.stiffness;
                    g.stiffness(ci, hk) += ch.stiffness;
                    g.convection(hk, ci) += hc.convection;
                    g.convection(ci, hk) += ch.convection;
                }
            }
            const Entry3 cc = quadrature_entry(axis, ci, ci, weight, mesh.left(), mesh.right(), options.quadrature);
            g.mass(ci, ci) = cc.mass;
            g.stiffness(ci, ci) = cc.stiffness;
            g.convection(ci, ci) = cc.convection;
        }
        // Distinct correctors on one axis only meet through quadrature.
        for (std::size_t cj = 0; cj < axis.corrector_count(); ++cj) {
            if (cj == ci) continue;
            const Entry3 cc = quadrature_entry(axis, ci, cj, weight, mesh.left(), mesh.right(), options.quadrature);
            g.mass(ci, cj) = cc.mass;
            g.stiffness(ci, cj) = cc.stiffness;
            g.convection(ci, cj) = cc.convection;
        }
    }
    return g;
}

DenseMatrix assemble_matrix(const ProblemSpec& problem, const EnrichedSpace& space, const AssemblyOptions& options) {
    problem.validate();
    EFEO_REQUIRE(problem.dimension() == space.dimension(), "assemble_matrix: space dimension differs from problem");
    const double eps = problem.epsilon;
    if (space.dimension() == 1) {
        const AxisGram g = assemble_axis_gram(space.x_axis(), problem.convection_1d(), options);
        return eps * g.stiffness + g.convection;
    }
    const auto b = problem.convection_2d();
    const AxisGram gx = assemble_axis_gram(space.x_axis(), Affine{1.0, 0.0}, options);
    const AxisGram gy = assemble_axis_gram(space.y_axis(), Affine{1.0, 0.0}, options);
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    DenseMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const TensorIndex ti = space.factors(static_cast<std::size_t>(i));
        const auto ix = static_cast<Eigen::Index>(ti.fx);
        const auto iy = static_cast<Eigen::Index>(ti.fy);
        for (Eigen::Index k = 0; k < n; ++k) {
            const TensorIndex tk = space.factors(static_cast<std::size_t>(k));
            const auto kx = static_cast<Eigen::Index>(tk.fx);
            const auto ky = static_cast<Eigen::Index>(tk.fy);
            const double my = gy.mass(iy, ky);
            const double mx = gx.mass(ix, kx);
            a(i, k) = eps * (gx.stiffness(ix, kx) * my + mx * gy.stiffness(iy, ky)) +
                      b[0] * gx.convection(ix, kx) * my + b[1] * mx * gy.convection(iy, ky);
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Loads

namespace {

constexpr int kLoadGaussOrder = 8;

/// int f c over the corrector's domain for the 1D forcing family.
double corrector_load_closed(const Corrector1D& c, const ForcingParams& f) {
    const double p = c.domain().lo;
    const double q = c.domain().hi;
    // x^compat in the local coordinate u = x - p
    const Poly weight = f.compat_factor ? Poly::linear(p, 1.0) : Poly::constant(1.0);
    const Poly ell = detail::blend_local(c, p);
    auto moment = [&](double omega) {
        return detail::raw_trig_moment(c, weight, p, q, omega) -
               detail::poly_trig_moment(weight * ell, p, q, omega);
    };
    double v = 0.0;
    if (f.m0 != 0.0) v += f.m0 * moment(f.n[0]).imag();
    if (f.m1 != 0.0) v += f.m1 * moment(f.n[1]).real();
    return v;
}

double corrector_load_quadrature(const Corrector1D& c, const ForcingParams& f, const LayerQuadratureOptions& opt) {
    const double layer = c.layer_point();
    return layer_quadrature([&](double x) { return forcing_eval(f, x) * c.eval(x).value; }, c.domain().lo,
                            c.domain().hi, std::span(&layer, 1), c.layer_scale(), opt)
        .value;
}

/// X_k(omega) = int f_k(x) exp(i omega x) dx for every member of an axis family.
std::vector<std::complex<double>> axis_trig_moments(const AxisBasis& axis, double omega) {
    std::vector<std::complex<double>> out(axis.size(), 0.0);
    const Mesh1D& mesh = axis.mesh();
    const GaussRule& rule = gauss_legendre(kLoadGaussOrder);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double p = mesh.node(e);
        const double q = mesh.node(e + 1);
        const double mid = 0.5 * (p + q);
        const double half = 0.5 * (q - p);
        std::complex<double> left = 0.0;
        std::complex<double> right = 0.0;
        for (int g = 0; g < rule.order(); ++g) {
            const double t = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(g)]);
            const double x = mid + half * rule.nodes[static_cast<std::size_t>(g)];
            const std::complex<double> z = std::polar(rule.weights[static_cast<std::size_t>(g)] * half, omega * x);
            left += (1.0 - t) * z;
            right += t * z;
        }
        if (e > 0) out[axis.hat_index(e)] += left;
        if (e + 2 < mesh.node_count()) out[axis.hat_index(e + 1)] += right;
    }
    for (std::size_t ci = 0; ci < axis.corrector_count(); ++ci) {
        const Corrector1D& c = axis.corrector(ci);
        const double p = c.domain().lo;
        const double q = c.domain().hi;
        const Poly one = Poly::constant(1.0);
        out[ci] = detail::raw_trig_moment(c, one, p, q, omega) -
                  detail::poly_trig_moment(detail::blend_local(c, p), p, q, omega);
    }
    return out;
}

}  // namespace

LoadAssembler::LoadAssembler(const ProblemSpec& problem, const EnrichedSpace& space, AssemblyOptions options)
    : problem_(problem), space_(&space), options_(options) {
    problem_.validate();
    EFEO_REQUIRE(problem_.dimension() == space.dimension(), "LoadAssembler: space dimension differs from problem");
    if (space.dimension() != 1) return;
    const Mesh1D& mesh = space.x_axis().mesh();
    const GaussRule& rule = gauss_legendre(kLoadGaussOrder);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double p = mesh.node(e);
        const double q = mesh.node(e + 1);
        for (int g = 0; g < rule.order(); ++g) {
            const double t = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(g)]);
            qx_.push_back(p + (q - p) * t);
            qw_.push_back(0.5 * (q - p) * rule.weights[static_cast<std::size_t>(g)]);
            qhat_.push_back(1.0 - t);
        }
    }
}

Vector LoadAssembler::operator()(const ForcingParams& f) const {
    EFEO_REQUIRE(f.dimension == problem_.dimension(), "assemble_load: forcing dimension differs from problem");
    return problem_.dimension() == 1 ? assemble_1d(f) : assemble_2d(f);
}

Vector LoadAssembler::assemble_1d(const ForcingParams& f) const {
    const AxisBasis& axis = space_->x_axis();
    const Mesh1D& mesh = axis.mesh();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(axis.size()));
    if (options_.route == IntegrationRoute::quadrature) {
        for (std::size_t k = 0; k < axis.size(); ++k) {
            out(static_cast<Eigen::Index>(k)) = load_direct(problem_, *space_, f, k, options_.quadrature);
        }
        return out;
    }
    const std::size_t per = static_cast<std::size_t>(kLoadGaussOrder);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        double left = 0.0;
        double right = 0.0;
        for (std::size_t g = e * per; g < (e + 1) * per; ++g) {
            const double fw = forcing_eval(f, qx_[g]) * qw_[g];
            if (!std::isfinite(fw)) throw NumericalError("assemble_load: non-finite forcing value");
            left += qhat_[g] * fw;
            right += (1.0 - qhat_[g]) * fw;
        }
        if (e > 0) out(static_cast<Eigen::Index>(axis.hat_index(e))) += left;
        if (e + 2 < mesh.node_count()) out(static_cast<Eigen::Index>(axis.hat_index(e + 1))) += right;
    }
    for (std::size_t ci = 0; ci < axis.corrector_count(); ++ci) {
        const Corrector1D& c = axis.corrector(ci);
        out(static_cast<Eigen::Index>(ci)) =
            detail::is_exp(c) ? corrector_load_closed(c, f) : corrector_load_quadrature(c, f, options_.quadrature);
    }
    return out;
}

Vector LoadAssembler::assemble_2d(const ForcingParams& f) const {
    // sin(n0 x + n1 y) = Im(e^{i n0 x} e^{i n1 y}),  cos(n2 x + n3 y) = Re(e^{i n2 x} e^{i n3 y})
    const auto x0 = axis_trig_moments(space_->x_axis(), f.n[0]);
    const auto y0 = axis_trig_moments(space_->y_axis(), f.n[1]);
    const auto x1 = axis_trig_moments(space_->x_axis(), f.n[2]);
    const auto y1 = axis_trig_moments(space_->y_axis(), f.n[3]);
    Vector out(static_cast<Eigen::Index>(space_->total_dim()));
    for (std::size_t k = 0; k < space_->total_dim(); ++k) {
        const TensorIndex t = space_->factors(k);
        out(static_cast<Eigen::Index>(k)) =
            f.m0 * (x0[t.fx] * y0[t.fy]).imag() + f.m1 * (x1[t.fx] * y1[t.fy]).real();
    }
    if (!out.allFinite()) throw NumericalError("assemble_load: non-finite load entry");
    return out;
}

Vector assemble_load(const ProblemSpec& problem, const EnrichedSpace& space, const ForcingParams& f,
                     const AssemblyOptions& options) {
    return LoadAssembler(problem, space, options)(f);
}

// ---------------------------------------------------------------------------
// Direct (matrix-free) evaluation

namespace {

std::vector<double> space_layer_points(const EnrichedSpace& space, int axis, double& scale) {
    std::vector<double> pts;
    scale = 0.0;
    const AxisBasis& ax = axis == 0 ? space.x_axis() : space.y_axis();
    for (std::size_t c = 0; c < ax.corrector_count(); ++c) {
        pts.push_back(ax.corrector(c).layer_point());
        scale = scale == 0.0 ? ax.corrector(c).layer_scale() : std::min(scale, ax.corrector(c).layer_scale());
    }
    return pts;
}

/// Graded Gauss points of a cell side: breakpoints, then `order` points per piece.
void graded_rule(double p, double q, std::span<const double> layers, double scale, int order,
                 std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const std::vector<double> pts = layer_breakpoints(p, q, layers, scale);
    const GaussRule& rule = gauss_legendre(order);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        const double half = 0.5 * (pts[i + 1] - pts[i]);
        for (int g = 0; g < rule.order(); ++g) {
            x.push_back(mid + half * rule.nodes[static_cast<std::size_t>(g)]);
            w.push_back(half * rule.weights[static_cast<std::size_t>(g)]);
        }
    }
}

}  // namespace

double bilinear_form_direct(const ProblemSpec& problem, const EnrichedSpace& space, std::span<const double> coeffs,
                            std::size_t test, const LayerQuadratureOptions& options) {
    problem.validate();
    EFEO_REQUIRE(coeffs.size() == space.total_dim(), "bilinear_form_direct: coefficient count mismatch");
    EFEO_REQUIRE(test < space.total_dim(), "bilinear_form_direct: test index out of range");
    const double eps = problem.epsilon;
    if (space.dimension() == 1) {
        const AxisBasis& axis = space.x_axis();
        const Affine b = problem.convection_1d();
        double scale = 0.0;
        const std::vector<double> layers = space_layer_points(space, 0, scale);
        const auto [e0, e1] = axis.support(test);
        double sum = 0.0;
        for (std::size_t e = e0; e < e1; ++e) {
            const double p = axis.mesh().node(e);
            const double q = axis.mesh().node(e + 1);
            sum += layer_quadrature(
                       [&](double x) {
                           const BasisValue u = space.combine(coeffs, {x, 0.0});
                           const ScalarEval v = axis.eval(test, x);
                           return eps * u.grad[0] * v.deriv + b(x) * u.grad[0] * v.value;
                       },
                       p, q, layers, scale, options)
                       .value;
        }
        return sum;
    }
    const auto b = problem.convection_2d();
    const TensorIndex t = space.factors(test);
    double sx = 0.0;
    double sy = 0.0;
    const std::vector<double> lx = space_layer_points(space, 0, sx);
    const std::vector<double> ly = space_layer_points(space, 1, sy);
    const auto [ex0, ex1] = space.x_axis().support(t.fx);
    const auto [ey0, ey1] = space.y_axis().support(t.fy);
    std::vector<double> gx, wx, gy, wy;
    double sum = 0.0;
    for (std::size_t ey = ey0; ey < ey1; ++ey) {
        graded_rule(space.y_axis().mesh().node(ey), space.y_axis().mesh().node(ey + 1), ly, sy, 12, gy, wy);
        for (std::size_t ex = ex0; ex < ex1; ++ex) {
            graded_rule(space.x_axis().mesh().node(ex), space.x_axis().mesh().node(ex + 1), lx, sx, 12, gx, wx);
            for (std::size_t j = 0; j < gy.size(); ++j) {
                for (std::size_t i = 0; i < gx.size(); ++i) {
                    const Point pt{gx[i], gy[j]};
                    const BasisValue u = space.combine(coeffs, pt);
                    const BasisValue v = space.eval(test, pt);
                    const double integrand = eps * (u.grad[0] * v.grad[0] + u.grad[1] * v.grad[1]) +
                                             (b[0] * u.grad[0] + b[1] * u.grad[1]) * v.value;
                    sum += wx[i] * wy[j] * integrand;
                }
            }
        }
    }
    return sum;
}

double load_direct(const ProblemSpec& problem, const EnrichedSpace& space, const ForcingParams& f, std::size_t test,
                   const LayerQuadratureOptions& options) {
    EFEO_REQUIRE(test < space.total_dim(), "load_direct: test index out of range");
    if (space.dimension() == 1) {
        const AxisBasis& axis = space.x_axis();
        double scale = 0.0;
        const std::vector<double> layers = space_layer_points(space, 0, scale);
        const auto [e0, e1] = axis.support(test);
        double sum = 0.0;
        for (std::size_t e = e0; e < e1; ++e) {
            sum += layer_quadrature([&](double x) { return forcing_eval(f, x) * axis.eval(test, x).value; },
                                    axis.mesh().node(e), axis.mesh().node(e + 1), layers, scale, options)
                       .value;
        }
        return sum;
    }
    (void)problem;
    const TensorIndex t = space.factors(test);
    double sx = 0.0;
    double sy = 0.0;
    const std::vector<double> lx = space_layer_points(space, 0, sx);
    const std::vector<double> ly = space_layer_points(space, 1, sy);
    const auto [ex0, ex1] = space.x_axis().support(t.fx);
    const auto [ey0, ey1] = space.y_axis().support(t.fy);
    std::vector<double> gx, wx, gy, wy;
    double sum = 0.0;
    for (std::size_t ey = ey0; ey < ey1; ++ey) {
        graded_rule(space.y_axis().mesh().node(ey), space.y_axis().mesh().node(ey + 1), ly, sy, 12, gy, wy);
        for (std::size_t ex = ex0; ex < ex1; ++ex) {
            graded_rule(space.x_axis().mesh().node(ex), space.x_axis().mesh().node(ex + 1), lx, sx, 12, gx, wx);
            for (std::size_t j = 0; j < gy.size(); ++j) {
                for (std::size_t i = 0; i < gx.size(); ++i) {
                    sum += wx[i] * wy[j] * forcing_eval(f, gx[i], gy[j]) * space.eval(test, {gx[i], gy[j]}).value;
                }
            }
        }
    }
    return sum;
}

void write_matrix_market(const DenseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix file: " + path);
    out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) out << a(i, j) << '\n';
    }
}

void write_matrix_market(const Vector& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write vector file: " + path);
    out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

}  // namespace efeo
