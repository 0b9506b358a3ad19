#include "corrector_integrals.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "efeo/error.hpp"

namespace efeo::detail {

namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;
constexpr double kSqrtPi = 1.0 / std::numbers::inv_sqrtpi;

/// erf(b) - erf(a) without cancellation in the tails.
double erf_diff(double a, double b) {
    if (a > 0.5 && b > 0.5) return std::erfc(a) - std::erfc(b);
    if (a < -0.5 && b < -0.5) return std::erfc(-b) - std::erfc(-a);
    return std::erf(b) - std::erf(a);
}

/// I_k = int_a^b t^k exp(-s^2 t^2) dt for k = 0..K-1.
void gauss_moments(double s, double a, double b, std::span<double> out) {
    const double s2 = s * s;
    const double ga = safe_exp(-s2 * a * a);
    const double gb = safe_exp(-s2 * b * b);
    out[0] = 0.5 * kSqrtPi / s * erf_diff(s * a, s * b);
    if (out.size() > 1) out[1] = (ga - gb) / (2.0 * s2);
    double ak = 1.0;  // a^(k-1)
    double bk = 1.0;
    for (std::size_t k = 2; k < out.size(); ++k) {
        ak *= a;
        bk *= b;
        out[k] = (static_cast<double>(k - 1) * out[k - 2] + ak * ga - bk * gb) / (2.0 * s2);
    }
}

/// int_a^b P(t) exp(-s^2 t^2) dt, P in t.
double gauss_poly(double s, const Poly& pt, double a, double b) {
    std::array<double, Poly::kMaxTerms> m{};
    const int d = pt.degree();
    gauss_moments(s, a, b, std::span(m.data(), static_cast<std::size_t>(d) + 1));
    double sum = 0.0;
    for (int k = 0; k <= d; ++k) sum += pt.c[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(k)];
    return sum;
}

const BoundaryExp& as_exp(const Corrector1D& c) {
    const auto* e = std::get_if<BoundaryExp>(&c.kind());
    EFEO_REQUIRE(e != nullptr, "corrector integral: exp profile required");
    return *e;
}

const InteriorErf& as_erf(const Corrector1D& c) {
    const auto* e = std::get_if<InteriorErf>(&c.kind());
    EFEO_REQUIRE(e != nullptr, "corrector integral: erf profile required");
    return *e;
}

/// int_p^q P(u) exp(-rate dist(x)) exp(i omega x) dx with rate scaled by `power`.
std::complex<double> exp_kernel(const Corrector1D& c, const Poly& local, double p, double q, double omega,
                                double power) {
    const BoundaryExp& e = as_exp(c);
    const double r = power * e.rate;
    const double h = q - p;
    const Interval dom = c.domain();
    if (e.side == Side::right) {
        // raw = exp(-r (hi - q)) exp(-r v), v = q - x in [0, h]; u = h - v.
        const double scale = safe_exp(-r * (dom.hi - q));
        if (scale == 0.0) return 0.0;
        const Poly pv = local.compose_affine(h, -1.0);
        const std::complex<double> mu(r, omega);
        return scale * std::exp(std::complex<double>(0.0, omega * q)) * poly_exp_integral(pv, mu, h);
    }
    const double scale = safe_exp(-r * (p - dom.lo));
    if (scale == 0.0) return 0.0;
    const std::complex<double> mu(r, -omega);
    return scale * std::exp(std::complex<double>(0.0, omega * p)) * poly_exp_integral(local, mu, h);
}

}  // namespace

bool is_exp(const Corrector1D& c) { return std::holds_alternative<BoundaryExp>(c.kind()); }

Poly blend_local(const Corrector1D& c, double p) {
    const double m = c.blend_slope();
    return Poly::linear(c.raw_left() + (p - c.domain().lo) * m, m);
}

std::complex<double> poly_trig_moment(const Poly& local, double p, double q, double omega) {
    if (omega == 0.0) {
        const Poly a = local.antiderivative();
        return a(q - p);
    }
    return std::exp(std::complex<double>(0.0, omega * p)) *
           poly_exp_integral(local, std::complex<double>(0.0, -omega), q - p);
}

double raw_moment(const Corrector1D& c, const Poly& local, double p, double q) {
    if (is_exp(c)) return exp_kernel(c, local, p, q, 0.0, 1.0).real();
    // int P erf(s t) = [Pi erf]_a^b - (2 s / sqrt(pi)) int Pi(t) exp(-s^2 t^2) dt,
    // with t = x - center and Pi the antiderivative of P in t.
    const InteriorErf& e = as_erf(c);
    const double a = p - e.center;
    const double b = q - e.center;
    const Poly pt = local.compose_affine(-a, 1.0);
    const Poly anti = pt.antiderivative();
    const double boundary = anti(b) * std::erf(e.scale * b) - anti(a) * std::erf(e.scale * a);
    return boundary - 2.0 * e.scale * kInvSqrtPi * gauss_poly(e.scale, anti, a, b);
}

double raw_deriv_moment(const Corrector1D& c, const Poly& local, double p, double q) {
    if (is_exp(c)) {
        const BoundaryExp& e = as_exp(c);
        const double sign = e.side == Side::right ? 1.0 : -1.0;
        return sign * e.rate * raw_moment(c, local, p, q);
    }
    const InteriorErf& e = as_erf(c);
    const double a = p - e.center;
    const double b = q - e.center;
    return 2.0 * e.scale * kInvSqrtPi * gauss_poly(e.scale, local.compose_affine(-a, 1.0), a, b);
}

std::complex<double> raw_trig_moment(const Corrector1D& c, const Poly& local, double p, double q,
                                     double omega) {
    return exp_kernel(c, local, p, q, omega, 1.0);
}

double raw_sq_moment(const Corrector1D& c, const Poly& local, double p, double q) {
    return exp_kernel(c, local, p, q, 0.0, 2.0).real();
}

double raw_deriv_sq(const Corrector1D& c, double p, double q) {
    if (is_exp(c)) {
        const BoundaryExp& e = as_exp(c);
        return e.rate * e.rate * raw_sq_moment(c, Poly::constant(1.0), p, q);
    }
    // (2 s / sqrt(pi))^2 int exp(-2 s^2 t^2) dt
    const InteriorErf& e = as_erf(c);
    const double s = e.scale;
    const double a = p - e.center;
    const double b = q - e.center;
    const double root2s = std::numbers::sqrt2 * s;
    const double g2 = 0.5 * kSqrtPi / root2s * erf_diff(root2s * a, root2s * b);
    return 4.0 * s * s / std::numbers::pi * g2;
}

double raw_deriv_raw_moment(const Corrector1D& c, const Poly& local, double p, double q) {
    EFEO_REQUIRE(local.degree() <= 1, "raw_deriv_raw_moment: degree must be <= 1");
    if (is_exp(c)) {
        const BoundaryExp& e = as_exp(c);
        const double sign = e.side == Side::right ? 1.0 : -1.0;
        return sign * e.rate * raw_sq_moment(c, local, p, q);
    }
    // raw' raw = (2 s / sqrt(pi)) G erf(s t).
    //   int G erf     = sqrt(pi) / (4 s) [erf^2]
    //   int t G erf   = [-G erf / (2 s^2)] + 1 / (s sqrt(pi)) int G^2
    const InteriorErf& e = as_erf(c);
    const double s = e.scale;
    const double a = p - e.center;
    const double b = q - e.center;
    const Poly pt = local.compose_affine(-a, 1.0);
    const double ea = std::erf(s * a);
    const double eb = std::erf(s * b);
    const double ga = safe_exp(-s * s * a * a);
    const double gb = safe_exp(-s * s * b * b);
    const double m0 = 0.25 * kSqrtPi / s * (eb * eb - ea * ea);
    const double root2s = std::numbers::sqrt2 * s;
    const double g2 = 0.5 * kSqrtPi / root2s * erf_diff(root2s * a, root2s * b);
    const double m1 = -(gb * eb - ga * ea) / (2.0 * s * s) + g2 / (s / kInvSqrtPi);
    return 2.0 * s * kInvSqrtPi * (pt.c[0] * m0 + pt.c[1] * m1);
}

}  // namespace efeo::detail
