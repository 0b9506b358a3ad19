#include "efeo/problem.hpp"

#include <cmath>
#include <string>

#include "efeo/error.hpp"

namespace efeo {

Affine ProblemSpec::convection_1d() const {
    switch (convection) {
        case ConvectionKind::neg_one: return {-1.0, 0.0};
        case ConvectionKind::x_plus_one: return {1.0, 1.0};
        case ConvectionKind::neg_x: return {0.0, -1.0};
        case ConvectionKind::none: return {0.0, 0.0};
        case ConvectionKind::neg_one_vec: break;
    }
    throw InvalidArgument("convection_1d: problem has a vector convection field");
}

std::array<double, 2> ProblemSpec::convection_2d() const {
    switch (convection) {
        case ConvectionKind::neg_one_vec: return {-1.0, -1.0};
        case ConvectionKind::none: return {0.0, 0.0};
        default: break;
    }
    throw InvalidArgument("convection_2d: problem has a scalar convection field");
}

void ProblemSpec::validate() const {
    EFEO_REQUIRE(std::isfinite(epsilon) && epsilon > 0.0, "problem: epsilon must be finite and > 0");
    EFEO_REQUIRE(x_domain.lo < x_domain.hi, "problem: empty x domain");
    EFEO_REQUIRE(y_domain.lo < y_domain.hi, "problem: empty y domain");
    if (convection == ConvectionKind::none) return;
    bool ok = false;
    switch (cls) {
        case ProblemClass::boundary1d:
            ok = convection == ConvectionKind::neg_one || convection == ConvectionKind::x_plus_one;
            break;
        case ProblemClass::interior1d: ok = convection == ConvectionKind::neg_x; break;
        case ProblemClass::square2d: ok = convection == ConvectionKind::neg_one_vec; break;
    }
    EFEO_REQUIRE(ok, "problem: convection '" + std::string(to_string(convection)) +
                         "' does not match class '" + std::string(to_string(cls)) + "'");
    if (cls == ProblemClass::interior1d) {
        EFEO_REQUIRE(x_domain.lo < 0.0 && x_domain.hi > 0.0,
                     "problem: interior1d domain must contain the turning point x = 0");
    }
}

ProblemSpec ProblemSpec::paradigm(double eps) {
    ProblemSpec p{ProblemClass::boundary1d, eps, ConvectionKind::neg_one, {-1.0, 1.0}, {0.0, 1.0}};
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::boundary_layer(double eps) {
    ProblemSpec p{ProblemClass::boundary1d, eps, ConvectionKind::x_plus_one, {0.0, 1.0}, {0.0, 1.0}};
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::interior_layer(double eps) {
    ProblemSpec p{ProblemClass::interior1d, eps, ConvectionKind::neg_x, {-1.0, 1.0}, {0.0, 1.0}};
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::square(double eps) {
    ProblemSpec p{ProblemClass::square2d, eps, ConvectionKind::neg_one_vec, {0.0, 1.0}, {0.0, 1.0}};
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::by_name(std::string_view name, double eps) {
    if (name == "paradigm1d") return paradigm(eps);
    if (name == "boundary1d") return boundary_layer(eps);
    if (name == "interior1d") return interior_layer(eps);
    if (name == "square2d") return square(eps);
    throw InvalidArgument("unknown problem '" + std::string(name) +
                          "' (expected paradigm1d, boundary1d, interior1d or square2d)");
}

std::string_view to_string(ProblemClass cls) {
    switch (cls) {
        case ProblemClass::boundary1d: return "boundary1d";
        case ProblemClass::interior1d: return "interior1d";
        case ProblemClass::square2d: return "square2d";
    }
    return "?";
}

std::string_view to_string(ConvectionKind kind) {
    switch (kind) {
        case ConvectionKind::neg_one: return "neg_one";
        case ConvectionKind::x_plus_one: return "x_plus_one";
        case ConvectionKind::neg_x: return "neg_x";
        case ConvectionKind::neg_one_vec: return "neg_one_vec";
        case ConvectionKind::none: return "none";
    }
    return "?";
}

ProblemClass problem_class_from_string(std::string_view name) {
    if (name == "boundary1d") return ProblemClass::boundary1d;
    if (name == "interior1d") return ProblemClass::interior1d;
    if (name == "square2d") return ProblemClass::square2d;
    throw InvalidArgument("unknown problem class '" + std::string(name) + "'");
}

}  // namespace efeo
