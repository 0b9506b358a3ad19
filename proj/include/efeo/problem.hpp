#pragma once

#include <array>
#include <string>
#include <string_view>

namespace efeo {

enum class ProblemClass { boundary1d, interior1d, square2d };

/// Convection fields used by the supported model problems.
///   neg_one        b(x) = -1           on (-1, 1)
///   x_plus_one     b(x) = x + 1        on (0, 1)
///   neg_x          b(x) = -x           on (-1, 1)
///   neg_one_vec    b(x, y) = (-1, -1)  on (0, 1)^2
///   none           b = 0 (pure diffusion, diagnostics only)
enum class ConvectionKind { neg_one, x_plus_one, neg_x, neg_one_vec, none };

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Affine 1D convection coefficient b(x) = offset + slope * x.
struct Affine {
    double offset = 0.0;
    double slope = 0.0;
    double operator()(double x) const { return offset + slope * x; }
};

/// The model problem  -eps * lap(u) + b . grad(u) = f,  u = 0 on the boundary.
/// Diffusion coefficient a(x) is the identity for every supported class.
struct ProblemSpec {
    ProblemClass cls = ProblemClass::boundary1d;
    double epsilon = 1e-3;
    ConvectionKind convection = ConvectionKind::x_plus_one;
    Interval x_domain{0.0, 1.0};
    Interval y_domain{0.0, 1.0};

    int dimension() const { return cls == ProblemClass::square2d ? 2 : 1; }

    /// b as an affine function of x (1D classes).
    Affine convection_1d() const;
    /// Constant convection vector (square2d).
    std::array<double, 2> convection_2d() const;

    /// Throws InvalidArgument when epsilon, domain or convection disagree with the class.
    void validate() const;

    /// -eps u'' - u' = f on (-1, 1): the paradigm boundary-layer problem.
    static ProblemSpec paradigm(double eps);
    /// -eps u'' + (x + 1) u' = f on (0, 1): layer at x = 1.
    static ProblemSpec boundary_layer(double eps);
    /// -eps u'' - x u' = f on (-1, 1): turning point at x = 0.
    static ProblemSpec interior_layer(double eps);
    /// -eps lap(u) - (1, 1) . grad(u) = f on (0, 1)^2: layers along x = 0 and y = 0.
    static ProblemSpec square(double eps);

    /// Looks up a preset by CLI name: paradigm1d, boundary1d, interior1d, square2d.
    static ProblemSpec by_name(std::string_view name, double eps);
};

std::string_view to_string(ProblemClass cls);
std::string_view to_string(ConvectionKind kind);
ProblemClass problem_class_from_string(std::string_view name);

}  // namespace efeo
