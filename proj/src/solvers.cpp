#include "efeo/solvers.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "efeo/error.hpp"
#include "efeo/quadrature.hpp"

namespace efeo {

DenseLu::DenseLu(const DenseMatrix& a) {
    EFEO_REQUIRE(a.rows() == a.cols() && a.rows() > 0, "DenseLu: matrix must be square and nonempty");
    if (!a.allFinite()) throw NumericalError("DenseLu: matrix has non-finite entries");
    lu_.compute(Eigen::MatrixXd(a));
    const Eigen::MatrixXd& packed = lu_.matrixLU();
    const double scale = a.cwiseAbs().maxCoeff();
    const double floor = scale * std::numeric_limits<double>::epsilon() * static_cast<double>(a.rows());
    for (Eigen::Index j = 0; j < packed.rows(); ++j) {
        if (!(std::abs(packed(j, j)) > floor)) {
            throw NumericalError("DenseLu: matrix is singular to working precision at pivot column " +
                                 std::to_string(j));
        }
    }
    const double rc = lu_.rcond();
    condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

Vector DenseLu::solve(const Vector& rhs) const {
    EFEO_REQUIRE(rhs.size() == lu_.rows(), "DenseLu::solve: right-hand side size mismatch");
    return lu_.solve(rhs);
}

namespace {

Vector checked_solve(const DenseMatrix& a, const DenseLu& lu, const Vector& rhs) {
    Vector x = lu.solve(rhs);
    const double target = 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    Vector r = rhs - a * x;
    // Iterative refinement recovers the last digits on badly scaled systems.
    for (int it = 0; it < 2 && r.lpNorm<Eigen::Infinity>() > target; ++it) {
        x += lu.solve(r);
        r = rhs - a * x;
    }
    const double res = r.lpNorm<Eigen::Infinity>();
    if (!x.allFinite()) throw NumericalError("solve_direct: non-finite solution");
    const double backward = 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>() +
                                      a.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>());
    if (res > std::max(target, backward)) {
        std::ostringstream msg;
        msg << "solve_direct: residual " << res << " exceeds tolerance " << std::max(target, backward);
        throw NumericalError(msg.str());
    }
    return x;
}

void warn_condition(const DenseLu& lu) {
    if (lu.ill_conditioned()) {
        std::cerr << "warning: system matrix is ill-conditioned (estimated condition "
                  << lu.condition_estimate() << ")\n";
    }
}

}  // namespace

Vector solve_direct(const DenseMatrix& a, const Vector& rhs) {
    const DenseLu lu(a);
    warn_condition(lu);
    return checked_solve(a, lu, rhs);
}

double Solution::value(const Point& p) const {
    return space->combine(std::span<const double>(coefficients.data(), static_cast<std::size_t>(coefficients.size())), p)
        .value;
}

std::vector<double> evaluate_solution(const Solution& sol, std::span<const Point> points) {
    EFEO_REQUIRE(sol.space != nullptr, "evaluate_solution: solution has no space");
    std::vector<double> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(sol.value(p));
    return out;
}

OracleSolver::OracleSolver(const ProblemSpec& problem, std::shared_ptr<const EnrichedSpace> space,
                           AssemblyOptions options)
    : problem_(problem),
      space_(std::move(space)),
      matrix_(assemble_matrix(problem_, *space_, options)),
      loads_(problem_, *space_, options),
      lu_(matrix_) {
    warn_condition(lu_);
}

Solution OracleSolver::solve(const ForcingParams& f) const {
    const Vector rhs = loads_(f);
    return Solution{checked_solve(matrix_, lu_, rhs), space_};
}

Solution fem_oracle(const ProblemSpec& problem, std::shared_ptr<const EnrichedSpace> space, const ForcingParams& f) {
    return OracleSolver(problem, std::move(space)).solve(f);
}

// ---------------------------------------------------------------------------
// Grid functions

double GridFunction::value(const Point& p) const {
    const std::size_t ex = x.locate(p[0]);
    const double tx = (p[0] - x.node(ex)) / x.width(ex);
    if (!y) {
        return (1.0 - tx) * values[ex] + tx * values[ex + 1];
    }
    const std::size_t ey = y->locate(p[1]);
    const double ty = (p[1] - y->node(ey)) / y->width(ey);
    const std::size_t stride = x.node_count();
    const double v00 = values[ey * stride + ex];
    const double v10 = values[ey * stride + ex + 1];
    const double v01 = values[(ey + 1) * stride + ex];
    const double v11 = values[(ey + 1) * stride + ex + 1];
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

double GridFunction::derivative(double xp) const {
    EFEO_REQUIRE(!y, "GridFunction::derivative: only defined for 1D grid functions");
    const std::size_t e = x.locate(xp);
    return (values[e + 1] - values[e]) / x.width(e);
}

// ---------------------------------------------------------------------------
// Reference solutions

ShishkinSpec reference_shishkin_spec(const ProblemSpec& problem, int n_ref, int axis) {
    ShishkinSpec s;
    s.n = n_ref;
    s.sigma = 2.0;
    s.beta = 1.0;
    switch (problem.convection) {
        case ConvectionKind::neg_one:
        case ConvectionKind::neg_one_vec:
            s.side = LayerSide::left;
            break;
        case ConvectionKind::x_plus_one:
            s.side = LayerSide::right;
            break;
        case ConvectionKind::neg_x:
            s.side = LayerSide::interior;
            s.center = 0.0;
            break;
        case ConvectionKind::none:
            s.side = LayerSide::both;
            break;
    }
    (void)axis;  // both axes of the square carry the same layer side
    return s;
}

int default_reference_resolution(const ProblemSpec& problem) { return problem.dimension() == 1 ? 8192 : 256; }

namespace {

constexpr int kReferenceGaussOrder = 6;

/// Tridiagonal P1 blocks of one axis: interior rows only, in node order.
struct P1Blocks {
    std::vector<double> k_lo, k_d, k_up;  // stiffness
    std::vector<double> m_lo, m_d, m_up;  // mass
    std::vector<double> c_lo, c_d, c_up;  // convection int w phi_k' phi_i
};

P1Blocks p1_blocks(const Mesh1D& mesh, Affine w) {
    const std::size_t n = mesh.interior_count();
    P1Blocks b;
    for (auto* v : {&b.k_lo, &b.k_d, &b.k_up, &b.m_lo, &b.m_d, &b.m_up, &b.c_lo, &b.c_d, &b.c_up}) v->assign(n, 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double h = mesh.width(e);
        const double w0 = w(mesh.node(e));
        const double w1 = w(mesh.node(e + 1));
        // int w phi_L = h (2 w0 + w1) / 6, int w phi_R = h (w0 + 2 w1) / 6
        const double wl = h * (2.0 * w0 + w1) / 6.0;
        const double wr = h * (w0 + 2.0 * w1) / 6.0;
        const bool left_free = e > 0;
        const bool right_free = e + 2 < mesh.node_count();
        const std::size_t il = e - 1;  // interior index of node e (valid if left_free)
        const std::size_t ir = e;      // interior index of node e + 1
        if (left_free) {
            b.k_d[il] += 1.0 / h;
            b.m_d[il] += h / 3.0;
            b.c_d[il] += -wl / h;
        }
        if (right_free) {
            b.k_d[ir] += 1.0 / h;
            b.m_d[ir] += h / 3.0;
            b.c_d[ir] += wr / h;
        }
        if (left_free && right_free) {
            b.k_up[il] += -1.0 / h;
            b.k_lo[il] += -1.0 / h;
            b.m_up[il] += h / 6.0;
            b.m_lo[il] += h / 6.0;
            b.c_up[il] += wl / h;   // row node e, trial node e+1
            b.c_lo[il] += -wr / h;  // row node e+1, trial node e
        }
    }
    return b;
}

/// int hat_i(x) exp(i omega x) for each interior node.
std::vector<std::complex<double>> hat_trig_moments(const Mesh1D& mesh, double omega) {
    std::vector<std::complex<double>> out(mesh.interior_count(), 0.0);
    const GaussRule& rule = gauss_legendre(kReferenceGaussOrder);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double p = mesh.node(e);
        const double h = mesh.width(e);
        std::complex<double> left = 0.0;
        std::complex<double> right = 0.0;
        for (int g = 0; g < rule.order(); ++g) {
            const double t = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(g)]);
            const std::complex<double> z =
                std::polar(0.5 * h * rule.weights[static_cast<std::size_t>(g)], omega * (p + h * t));
            left += (1.0 - t) * z;
            right += t * z;
        }
        if (e > 0) out[e - 1] += left;
        if (e + 2 < mesh.node_count()) out[e] += right;
    }
    return out;
}

}  // namespace

struct ReferenceSolver::Impl {
    Mesh1D x;
    std::optional<Mesh1D> y;
    std::optional<TridiagonalLu> tri;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse;
};

ReferenceSolver::ReferenceSolver(const ProblemSpec& problem, int n_ref)
    : problem_(problem), n_ref_(n_ref), impl_(std::make_unique<Impl>()) {
    problem_.validate();
    const double eps = problem_.epsilon;
    if (problem_.dimension() == 1) {
        EFEO_REQUIRE(n_ref >= 256, "shishkin_reference: n_ref must be at least 256 in 1D");
        const ShishkinSpec s = reference_shishkin_spec(problem_, n_ref);
        impl_->x = build_shishkin_mesh_1d(problem_.x_domain.lo, problem_.x_domain.hi, s, eps);
        const P1Blocks b = p1_blocks(impl_->x, problem_.convection_1d());
        const std::size_t n = b.k_d.size();
        std::vector<double> lo(n - 1), d(n), up(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = eps * b.k_d[i] + b.c_d[i];
            if (i + 1 < n) {
                lo[i] = eps * b.k_lo[i] + b.c_lo[i];
                up[i] = eps * b.k_up[i] + b.c_up[i];
            }
        }
        impl_->tri.emplace(std::move(lo), std::move(d), std::move(up));
        return;
    }
    EFEO_REQUIRE(n_ref >= 128, "shishkin_reference: n_ref must be at least 128 per axis in 2D");
    const ShishkinSpec sx = reference_shishkin_spec(problem_, n_ref, 0);
    const ShishkinSpec sy = reference_shishkin_spec(problem_, n_ref, 1);
    impl_->x = build_shishkin_mesh_1d(problem_.x_domain.lo, problem_.x_domain.hi, sx, eps);
    impl_->y = build_shishkin_mesh_1d(problem_.y_domain.lo, problem_.y_domain.hi, sy, eps);
    const auto bvec = problem_.convection_2d();
    const P1Blocks bx = p1_blocks(impl_->x, Affine{1.0, 0.0});
    const P1Blocks by = p1_blocks(*impl_->y, Affine{1.0, 0.0});
    const auto nx = static_cast<int>(bx.k_d.size());
    const auto ny = static_cast<int>(by.k_d.size());
    auto band = [](const std::vector<double>& lo, const std::vector<double>& d, const std::vector<double>& up, int i,
                   int k) {
        if (k == i) return d[static_cast<std::size_t>(i)];
        if (k == i + 1) return up[static_cast<std::size_t>(i)];
        return lo[static_cast<std::size_t>(k)];  // k == i - 1
    };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * 9);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row = j * nx + i;
            for (int l = std::max(0, j - 1); l <= std::min(ny - 1, j + 1); ++l) {
                const double my = band(by.m_lo, by.m_d, by.m_up, j, l);
                const double ky = band(by.k_lo, by.k_d, by.k_up, j, l);
                const double cy = band(by.c_lo, by.c_d, by.c_up, j, l);
                for (int k = std::max(0, i - 1); k <= std::min(nx - 1, i + 1); ++k) {
                    const double mx = band(bx.m_lo, bx.m_d, bx.m_up, i, k);
                    const double kx = band(bx.k_lo, bx.k_d, bx.k_up, i, k);
                    const double cx = band(bx.c_lo, bx.c_d, bx.c_up, i, k);
                    const double v = eps * (kx * my + mx * ky) + bvec[0] * cx * my + bvec[1] * mx * cy;
                    trip.emplace_back(row, l * nx + k, v);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> a(nx * ny, nx * ny);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    impl_->sparse.compute(a);
    if (impl_->sparse.info() != Eigen::Success) {
        throw NumericalError("shishkin_reference: sparse factorization failed: " + impl_->sparse.lastErrorMessage());
    }
}

ReferenceSolver::~ReferenceSolver() = default;
ReferenceSolver::ReferenceSolver(ReferenceSolver&&) noexcept = default;
ReferenceSolver& ReferenceSolver::operator=(ReferenceSolver&&) noexcept = default;

GridFunction ReferenceSolver::solve(const ForcingParams& f) const {
    EFEO_REQUIRE(f.dimension == problem_.dimension(), "shishkin_reference: forcing dimension differs from problem");
    const Mesh1D& x = impl_->x;
    if (!impl_->y) {
        std::vector<double> rhs(x.interior_count(), 0.0);
        const GaussRule& rule = gauss_legendre(kReferenceGaussOrder);
        for (std::size_t e = 0; e < x.element_count(); ++e) {
            const double p = x.node(e);
            const double h = x.width(e);
            double left = 0.0;
            double right = 0.0;
            for (int g = 0; g < rule.order(); ++g) {
                const double t = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(g)]);
                const double fw = 0.5 * h * rule.weights[static_cast<std::size_t>(g)] * forcing_eval(f, p + h * t);
                left += (1.0 - t) * fw;
                right += t * fw;
            }
            if (e > 0) rhs[e - 1] += left;
            if (e + 2 < x.node_count()) rhs[e] += right;
        }
        const std::vector<double> u = impl_->tri->solve(std::move(rhs));
        GridFunction g{x, std::nullopt, std::vector<double>(x.node_count(), 0.0)};
        std::copy(u.begin(), u.end(), g.values.begin() + 1);
        for (double v : g.values) {
            if (!std::isfinite(v)) throw NumericalError("shishkin_reference: non-finite solution");
        }
        return g;
    }
    const Mesh1D& y = *impl_->y;
    const auto x0 = hat_trig_moments(x, f.n[0]);
    const auto y0 = hat_trig_moments(y, f.n[1]);
    const auto x1 = hat_trig_moments(x, f.n[2]);
    const auto y1 = hat_trig_moments(y, f.n[3]);
    const std::size_t nx = x0.size();
    const std::size_t ny = y0.size();
    Vector rhs(static_cast<Eigen::Index>(nx * ny));
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            rhs(static_cast<Eigen::Index>(j * nx + i)) = f.m0 * (x0[i] * y0[j]).imag() + f.m1 * (x1[i] * y1[j]).real();
        }
    }
    const Vector u = impl_->sparse.solve(rhs);
    if (impl_->sparse.info() != Eigen::Success || !u.allFinite()) {
        throw NumericalError("shishkin_reference: sparse solve failed");
    }
    GridFunction g{x, y, std::vector<double>(x.node_count() * y.node_count(), 0.0)};
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            g.values[(j + 1) * x.node_count() + i + 1] = u(static_cast<Eigen::Index>(j * nx + i));
        }
    }
    return g;
}

GridFunction shishkin_reference(const ProblemSpec& problem, const ForcingParams& f, std::optional<int> n_ref) {
    return ReferenceSolver(problem, n_ref.value_or(default_reference_resolution(problem))).solve(f);
}

// ---------------------------------------------------------------------------
// Reference cache

ReferenceCache::ReferenceCache(std::string directory) : dir_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create reference cache directory: " + dir_);
}

std::string ReferenceCache::key(const ProblemSpec& problem, int n_ref, const ForcingParams& f) const {
    std::ostringstream s;
    s << std::setprecision(17) << to_string(problem.cls) << '|' << to_string(problem.convection) << '|'
      << problem.epsilon << '|' << n_ref << '|' << f.dimension << '|' << f.compat_factor;
    for (double v : f.flat()) s << '|' << v;
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char ch : s.str()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void write_doubles(std::ostream& out, std::span<const double> v) {
    const std::uint64_t n = v.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

bool read_doubles(std::istream& in, std::vector<double>& v) {
    std::uint64_t n = 0;
    if (!in.read(reinterpret_cast<char*>(&n), sizeof n) || n > (1ULL << 32)) return false;
    v.resize(n);
    return static_cast<bool>(in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))));
}

}  // namespace

std::optional<GridFunction> ReferenceCache::load(const std::string& key) const {
    std::ifstream in(std::filesystem::path(dir_) / (key + ".ref"), std::ios::binary);
    if (!in) return std::nullopt;
    std::vector<double> x, y, values;
    if (!read_doubles(in, x) || !read_doubles(in, y) || !read_doubles(in, values)) return std::nullopt;
    try {
        GridFunction g{Mesh1D(std::move(x)), std::nullopt, std::move(values)};
        if (!y.empty()) g.y = Mesh1D(std::move(y));
        const std::size_t expect = g.x.node_count() * (g.y ? g.y->node_count() : 1);
        if (g.values.size() != expect) return std::nullopt;
        return g;
    } catch (const InvalidArgument&) {
        return std::nullopt;  // corrupt entry, recompute
    }
}

void ReferenceCache::store(const std::string& key, const GridFunction& g) const {
    const auto path = std::filesystem::path(dir_) / (key + ".ref");
    const auto tmp = std::filesystem::path(dir_) / (key + ".ref.tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write reference cache entry: " + tmp.string());
        write_doubles(out, g.x.nodes());
        if (g.y) {
            write_doubles(out, g.y->nodes());
        } else {
            write_doubles(out, {});
        }
        write_doubles(out, g.values);
        if (!out) throw IoError("cannot write reference cache entry: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Tridiagonal LU

TridiagonalLu::TridiagonalLu(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
    : dl_(std::move(lower)), d_(std::move(diag)), du_(std::move(upper)) {
    const std::size_t n = d_.size();
    EFEO_REQUIRE(n >= 1, "TridiagonalLu: empty system");
    EFEO_REQUIRE(dl_.size() + 1 == n && du_.size() + 1 == n, "TridiagonalLu: band sizes must be n - 1");
    du2_.assign(n > 2 ? n - 2 : 0, 0.0);
    ipiv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) ipiv_[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d_[i]) >= std::abs(dl_[i])) {
            // no row interchange
            if (d_[i] == 0.0) throw NumericalError("TridiagonalLu: zero pivot at column " + std::to_string(i));
            const double fact = dl_[i] / d_[i];
            dl_[i] = fact;
            d_[i + 1] -= fact * du_[i];
        } else {
            const double fact = d_[i] / dl_[i];
            d_[i] = dl_[i];
            dl_[i] = fact;
            const double temp = du_[i];
            du_[i] = d_[i + 1];
            d_[i + 1] = temp - fact * d_[i + 1];
            if (i + 2 < n) {
                du2_[i] = du_[i + 1];
                du_[i + 1] = -fact * du_[i + 1];
            }
            ipiv_[i] = i + 1;
        }
    }
    if (d_[n - 1] == 0.0) throw NumericalError("TridiagonalLu: zero pivot at column " + std::to_string(n - 1));
}

std::vector<double> TridiagonalLu::solve(std::vector<double> b) const {
    const std::size_t n = d_.size();
    EFEO_REQUIRE(b.size() == n, "TridiagonalLu::solve: right-hand side size mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (ipiv_[i] == i) {
            b[i + 1] -= dl_[i] * b[i];
        } else {
            const double temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl_[i] * b[i];
        }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (std::size_t k = n > 2 ? n - 2 : 0; k-- > 0;) {
        b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
    }
    return b;
}

// ---------------------------------------------------------------------------
// CSV output

void write_solution_csv(const Solution& sol, int resolution, const std::string& path) {
    EFEO_REQUIRE(resolution >= 2, "write_solution_csv: resolution must be at least 2");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write solution file: " + path);
    out << std::setprecision(17);
    const EnrichedSpace& s = *sol.space;
    const Mesh1D& mx = s.x_axis().mesh();
    auto coord = [resolution](const Mesh1D& m, int i) {
        return i == resolution - 1 ? m.right() : m.left() + m.length() * i / (resolution - 1);
    };
    if (s.dimension() == 1) {
        out << "x,u\n";
        for (int i = 0; i < resolution; ++i) {
            const double x = coord(mx, i);
            out << x << ',' << sol.value({x, 0.0}) << '\n';
        }
        return;
    }
    const Mesh1D& my = s.y_axis().mesh();
    out << "x,y,u\n";
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            const double x = coord(mx, i);
            const double y = coord(my, j);
            out << x << ',' << y << ',' << sol.value({x, y}) << '\n';
        }
    }
}

void write_grid_function_csv(const GridFunction& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write grid function file: " + path);
    out << std::setprecision(17);
    if (!g.y) {
        out << "x,u\n";
        for (std::size_t i = 0; i < g.x.node_count(); ++i) out << g.x.node(i) << ',' << g.values[i] << '\n';
        return;
    }
    out << "x,y,u\n";
    for (std::size_t j = 0; j < g.y->node_count(); ++j) {
        for (std::size_t i = 0; i < g.x.node_count(); ++i) {
            out << g.x.node(i) << ',' << g.y->node(j) << ',' << g.values[j * g.x.node_count() + i] << '\n';
        }
    }
}

}  // namespace efeo
