#include "efeo/poly.hpp"

#include <cmath>

#include "efeo/error.hpp"

namespace efeo::detail {

Poly Poly::constant(double v) {
    Poly p;
    p.c[0] = v;
    return p;
}

Poly Poly::linear(double v0, double v1) {
    Poly p;
    p.c[0] = v0;
    p.c[1] = v1;
    return p;
}

int Poly::degree() const {
    for (int k = static_cast<int>(kMaxTerms) - 1; k > 0; --k) {
        if (c[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return 0;
}

double Poly::operator()(double t) const {
    double v = 0.0;
    for (int k = degree(); k >= 0; --k) v = v * t + c[static_cast<std::size_t>(k)];
    return v;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    for (std::size_t k = 0; k < kMaxTerms; ++k) r.c[k] = c[k] + o.c[k];
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r;
    for (std::size_t k = 0; k < kMaxTerms; ++k) r.c[k] = c[k] - o.c[k];
    return r;
}

Poly Poly::operator*(double s) const {
    Poly r;
    for (std::size_t k = 0; k < kMaxTerms; ++k) r.c[k] = c[k] * s;
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    const int da = degree();
    const int db = o.degree();
    EFEO_REQUIRE(da + db < static_cast<int>(kMaxTerms), "Poly: product degree overflow");
    Poly r;
    for (int i = 0; i <= da; ++i) {
        for (int j = 0; j <= db; ++j) {
            r.c[static_cast<std::size_t>(i + j)] += c[static_cast<std::size_t>(i)] * o.c[static_cast<std::size_t>(j)];
        }
    }
    return r;
}

Poly Poly::compose_affine(double alpha, double beta) const {
    // Horner in the polynomial ring: r = (...(c_d) * (alpha + beta t) + c_{d-1}) ...
    const Poly lin = linear(alpha, beta);
    Poly r;
    for (int k = degree(); k >= 0; --k) {
        r = r * lin;
        r.c[0] += c[static_cast<std::size_t>(k)];
    }
    return r;
}

Poly Poly::antiderivative() const {
    EFEO_REQUIRE(degree() + 1 < static_cast<int>(kMaxTerms), "Poly: antiderivative degree overflow");
    Poly r;
    for (std::size_t k = 0; k + 1 < kMaxTerms; ++k) r.c[k + 1] = c[k] / static_cast<double>(k + 1);
    return r;
}

Poly Poly::derivative() const {
    Poly r;
    for (std::size_t k = 1; k < kMaxTerms; ++k) r.c[k - 1] = c[k] * static_cast<double>(k);
    return r;
}

void exp_moments(std::complex<double> mu, double h, std::span<std::complex<double>> out) {
    const std::size_t terms = out.size();
    const double z = std::abs(mu) * h;
    if (z < 1.0) {
        // J_k = sum_j (-mu)^j h^(k+j+1) / (j! (k+j+1))
        for (std::size_t k = 0; k < terms; ++k) {
            std::complex<double> term = std::pow(h, static_cast<double>(k + 1));  // j = 0 numerator
            std::complex<double> sum = term / static_cast<double>(k + 1);
            for (int j = 1; j < 60; ++j) {
                term *= -mu * h / static_cast<double>(j);
                const std::complex<double> add = term / static_cast<double>(k + static_cast<std::size_t>(j) + 1);
                sum += add;
                if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
            }
            out[k] = sum;
        }
        return;
    }
    // J_0 = (1 - e^{-mu h}) / mu,  J_k = (k J_{k-1} - h^k e^{-mu h}) / mu
    const std::complex<double> e = mu.real() * h > 745.0 ? std::complex<double>(0.0) : std::exp(-mu * h);
    out[0] = -std::expm1(-mu.real() * h) / mu;
    if (mu.imag() != 0.0) out[0] = (1.0 - e) / mu;
    double hk = 1.0;
    for (std::size_t k = 1; k < terms; ++k) {
        hk *= h;
        out[k] = (static_cast<double>(k) * out[k - 1] - hk * e) / mu;
    }
}

std::complex<double> poly_exp_integral(const Poly& p, std::complex<double> mu, double h) {
    const int d = p.degree();
    std::array<std::complex<double>, Poly::kMaxTerms> j{};
    exp_moments(mu, h, std::span(j.data(), static_cast<std::size_t>(d) + 1));
    std::complex<double> sum = 0.0;
    for (int k = 0; k <= d; ++k) sum += p.c[static_cast<std::size_t>(k)] * j[static_cast<std::size_t>(k)];
    return sum;
}

double poly_integral(const Poly& p, double a, double b) {
    const Poly q = p.antiderivative();
    return q(b) - q(a);
}

}  // namespace efeo::detail
