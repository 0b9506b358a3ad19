#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "efeo/assembly.hpp"
#include "efeo/basis.hpp"
#include "efeo/geometry.hpp"
#include "efeo/linalg.hpp"
#include "efeo/sampling.hpp"

namespace efeo {

/// Dense LU with partial pivoting, factored once and reused for many loads.
class DenseLu {
public:
    /// Throws NumericalError naming the first pivot column that is zero to
    /// working precision.
    explicit DenseLu(const DenseMatrix& a);

    Vector solve(const Vector& rhs) const;
    std::size_t size() const { return static_cast<std::size_t>(lu_.rows()); }
    /// Estimated 1-norm condition number.
    double condition_estimate() const { return condition_; }
    /// True when the condition estimate exceeds 1e14.
    bool ill_conditioned() const { return condition_ > 1e14; }

private:
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_ = 1.0;
};

/// Solves A alpha = F. The residual is verified against
/// ||A alpha - F||_inf <= 1e-10 (1 + ||F||_inf) scaled by the condition
/// estimate; a failure throws NumericalError.
Vector solve_direct(const DenseMatrix& a, const Vector& rhs);

/// Coefficients over an enriched space, correctors first.
struct Solution {
    Vector coefficients;
    std::shared_ptr<const EnrichedSpace> space;

    double value(const Point& p) const;
};

/// Point values of a solution; throws InvalidArgument for points outside the domain.
std::vector<double> evaluate_solution(const Solution& sol, std::span<const Point> points);

/// Assembles and factors the enriched Galerkin system once; every solve()
/// only assembles a load vector.
class OracleSolver {
public:
    OracleSolver(const ProblemSpec& problem, std::shared_ptr<const EnrichedSpace> space,
                 AssemblyOptions options = {});

    Solution solve(const ForcingParams& f) const;
    const DenseMatrix& matrix() const { return matrix_; }
    const LoadAssembler& loads() const { return loads_; }
    const DenseLu& factorization() const { return lu_; }
    const std::shared_ptr<const EnrichedSpace>& space() const { return space_; }
    const ProblemSpec& problem() const { return problem_; }

private:
    ProblemSpec problem_;
    std::shared_ptr<const EnrichedSpace> space_;
    DenseMatrix matrix_;
    LoadAssembler loads_;
    DenseLu lu_;
};

Solution fem_oracle(const ProblemSpec& problem, std::shared_ptr<const EnrichedSpace> space,
                    const ForcingParams& f);

/// Nodal values on a 1D mesh or a tensor 2D mesh, boundary nodes included.
/// 2D values are stored with x fastest: index = j * (nx + 1) + i.
struct GridFunction {
    Mesh1D x;
    std::optional<Mesh1D> y;
    std::vector<double> values;

    int dimension() const { return y ? 2 : 1; }
    /// Piecewise linear (1D) or bilinear (2D) interpolation.
    double value(const Point& p) const;
    /// Derivative of the 1D interpolant; shared nodes use the left element.
    double derivative(double x) const;
};

/// Per-axis Shishkin parameters used for reference solutions.
ShishkinSpec reference_shishkin_spec(const ProblemSpec& problem, int n_ref, int axis = 0);

/// Plain P1/Q1 Galerkin on the layer-adapted mesh, factored once and reused.
/// 1D systems are tridiagonal; 2D systems use a sparse LU.
class ReferenceSolver {
public:
    ReferenceSolver(const ProblemSpec& problem, int n_ref);
    ~ReferenceSolver();
    ReferenceSolver(ReferenceSolver&&) noexcept;
    ReferenceSolver& operator=(ReferenceSolver&&) noexcept;

    GridFunction solve(const ForcingParams& f) const;
    int n_ref() const { return n_ref_; }

private:
    struct Impl;
    ProblemSpec problem_;
    int n_ref_;
    std::unique_ptr<Impl> impl_;
};

/// Defaults: n_ref = 8192 (1D), 256 per axis (2D). Minimums 256 and 128.
GridFunction shishkin_reference(const ProblemSpec& problem, const ForcingParams& f,
                                std::optional<int> n_ref = std::nullopt);

int default_reference_resolution(const ProblemSpec& problem);

/// Disk cache for reference solutions keyed by a hash of
/// (problem, epsilon, n_ref, forcing parameters).
class ReferenceCache {
public:
    explicit ReferenceCache(std::string directory);
    std::string key(const ProblemSpec& problem, int n_ref, const ForcingParams& f) const;
    std::optional<GridFunction> load(const std::string& key) const;
    void store(const std::string& key, const GridFunction& g) const;

private:
    std::string dir_;
};

/// Tridiagonal LU with partial pivoting (the dgttrf/dgttrs scheme).
class TridiagonalLu {
public:
    /// lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
    TridiagonalLu(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);
    std::vector<double> solve(std::vector<double> rhs) const;

private:
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<std::size_t> ipiv_;
};

/// Writes "x,u" (1D) or "x,y,u" (2D) rows on a uniform grid of `resolution` points per axis.
void write_solution_csv(const Solution& sol, int resolution, const std::string& path);
void write_grid_function_csv(const GridFunction& g, const std::string& path);

}  // namespace efeo
