#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace efeo::detail {

/// Dense polynomial c0 + c1 t + ... of degree < kMaxTerms.
struct Poly {
    static constexpr std::size_t kMaxTerms = 8;
    std::array<double, kMaxTerms> c{};

    Poly() = default;
    static Poly constant(double v);
    /// v0 + v1 * t
    static Poly linear(double v0, double v1);

    int degree() const;
    double operator()(double t) const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;
    /// q(t) = p(alpha + beta * t)
    Poly compose_affine(double alpha, double beta) const;
    /// Antiderivative vanishing at t = 0.
    Poly antiderivative() const;
    Poly derivative() const;
};

/// J_k(mu, h) = int_0^h t^k exp(-mu t) dt for Re(mu) >= 0, k < Poly::kMaxTerms.
/// Uses the power series for |mu h| < 1 and upward recurrence otherwise.
void exp_moments(std::complex<double> mu, double h, std::span<std::complex<double>> out);

/// int_0^h p(t) exp(-mu t) dt.
std::complex<double> poly_exp_integral(const Poly& p, std::complex<double> mu, double h);

/// Exact integral of p over [a, b].
double poly_integral(const Poly& p, double a, double b);

}  // namespace efeo::detail
