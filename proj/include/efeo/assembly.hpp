#pragma once

#include <string>
#include <vector>

#include "efeo/basis.hpp"
#include "efeo/linalg.hpp"
#include "efeo/problem.hpp"
#include "efeo/quadrature.hpp"
#include "efeo/sampling.hpp"

namespace efeo {

/// How integrals that involve corrector profiles are computed.
///   closed_form  exact exp/erf primitives (erf load rows use layer quadrature)
///   quadrature   layer_quadrature on every element, for cross-checking
enum class IntegrationRoute { closed_form, quadrature };

struct AssemblyOptions {
    IntegrationRoute route = IntegrationRoute::closed_form;
    LayerQuadratureOptions quadrature{};
};

/// Gram blocks of one axis family over its domain, family ordering:
///   mass(i, k)       = int f_k f_i
///   stiffness(i, k)  = int f_k' f_i'
///   convection(i, k) = int w(x) f_k' f_i
struct AxisGram {
    DenseMatrix mass;
    DenseMatrix stiffness;
    DenseMatrix convection;
};

AxisGram assemble_axis_gram(const AxisBasis& axis, Affine weight, const AssemblyOptions& options = {});

/// A(i, k) = B[phi_k, phi_i] = eps int grad phi_k . grad phi_i + int (b . grad phi_k) phi_i.
/// 2D entries are assembled from products of 1D axis Gram blocks.
DenseMatrix assemble_matrix(const ProblemSpec& problem, const EnrichedSpace& space,
                            const AssemblyOptions& options = {});

/// Precomputes quadrature data so that load vectors of many forcings can be
/// assembled cheaply. Safe to share across threads once constructed.
class LoadAssembler {
public:
    LoadAssembler(const ProblemSpec& problem, const EnrichedSpace& space, AssemblyOptions options = {});

    /// F(i) = int f phi_i.
    Vector operator()(const ForcingParams& f) const;
    std::size_t size() const { return space_->total_dim(); }

private:
    Vector assemble_1d(const ForcingParams& f) const;
    Vector assemble_2d(const ForcingParams& f) const;

    ProblemSpec problem_;
    const EnrichedSpace* space_;
    AssemblyOptions options_;
    std::vector<double> qx_;      // per-element Gauss points, element-major
    std::vector<double> qw_;
    std::vector<double> qhat_;    // left-node hat value at each point
};

Vector assemble_load(const ProblemSpec& problem, const EnrichedSpace& space, const ForcingParams& f,
                     const AssemblyOptions& options = {});

/// B[u, phi_test] for u = sum_k coeffs[k] phi_k, integrated directly from
/// pointwise values of u (no matrix), element by element with layer quadrature.
double bilinear_form_direct(const ProblemSpec& problem, const EnrichedSpace& space,
                            std::span<const double> coeffs, std::size_t test,
                            const LayerQuadratureOptions& options = {});

/// int f phi_test by layer quadrature on every element.
double load_direct(const ProblemSpec& problem, const EnrichedSpace& space, const ForcingParams& f,
                   std::size_t test, const LayerQuadratureOptions& options = {});

/// Matrix Market "array real general" (column-major values).
void write_matrix_market(const DenseMatrix& a, const std::string& path);
void write_matrix_market(const Vector& v, const std::string& path);

}  // namespace efeo
