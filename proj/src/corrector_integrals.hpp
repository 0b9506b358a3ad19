#pragma once

// Closed-form integrals of corrector profiles against polynomials on one
// interval [p, q] of the corrector's domain. Polynomials are given in the
// local coordinate u = x - p.

#include <complex>

#include "efeo/basis.hpp"
#include "efeo/poly.hpp"

namespace efeo::detail {

/// int_p^q P(u) raw(x) dx
double raw_moment(const Corrector1D& c, const Poly& local, double p, double q);
/// int_p^q P(u) raw'(x) dx
double raw_deriv_moment(const Corrector1D& c, const Poly& local, double p, double q);
/// int_p^q P(u) raw(x) exp(i omega x) dx   (exp profiles only)
std::complex<double> raw_trig_moment(const Corrector1D& c, const Poly& local, double p, double q,
                                     double omega);
/// int_p^q P(u) exp(i omega x) dx
std::complex<double> poly_trig_moment(const Poly& local, double p, double q, double omega);
/// int_p^q raw'(x)^2 dx
double raw_deriv_sq(const Corrector1D& c, double p, double q);
/// int_p^q P(u) raw'(x) raw(x) dx,  deg P <= 1
double raw_deriv_raw_moment(const Corrector1D& c, const Poly& local, double p, double q);
/// int_p^q P(u) raw(x)^2 dx  (exp profiles only)
double raw_sq_moment(const Corrector1D& c, const Poly& local, double p, double q);

/// Blend line l(x) = (1 - s) raw(a) + s raw(b) in the local coordinate of [p, .].
Poly blend_local(const Corrector1D& c, double p);

bool is_exp(const Corrector1D& c);

}  // namespace efeo::detail
