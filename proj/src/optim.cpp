#include "efeo/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "efeo/error.hpp"

namespace efeo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Minimizer of the cubic through (x1, f1, g1), (x2, f2, g2), clipped to bounds.
double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2, double lo, double hi) {
    const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    const double d2_sq = d1 * d1 - g1 * g2;
    if (d2_sq >= 0.0) {
        const double d2 = std::sqrt(d2_sq);
        const double pos = x1 <= x2 ? x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
                                    : x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
        if (std::isfinite(pos)) return std::clamp(pos, lo, hi);
    }
    return 0.5 * (lo + hi);
}

struct Probe {
    double t = 0.0;
    double f = 0.0;
    std::vector<double> g;
    double gtd = 0.0;
};

}  // namespace

LineSearchResult strong_wolfe(const Objective& objective, std::span<const double> x, double f0,
                              std::span<const double> g0, std::span<const double> d, double t0, double c1,
                              double c2, int max_evaluations) {
    const std::size_t n = x.size();
    const double d_norm = max_abs(d);
    const double gtd0 = dot(g0, d);
    constexpr double kTolChange = 1e-9;
    std::vector<double> trial(n);
    LineSearchResult result;

    auto evaluate = [&](double t) {
        Probe p;
        p.t = t;
        p.g.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[i];
        p.f = objective(trial, p.g);
        p.gtd = dot(p.g, d);
        ++result.evaluations;
        return p;
    };

    Probe prev{0.0, f0, std::vector<double>(g0.begin(), g0.end()), gtd0};
    Probe cur = evaluate(t0);
    bool done = false;
    int iter = 0;
    std::array<Probe, 2> bracket;
    bool have_bracket = false;

    while (iter < max_evaluations) {
        if (!std::isfinite(cur.f) || cur.f > f0 + c1 * cur.t * gtd0 || (iter > 1 && cur.f >= prev.f)) {
            bracket = {prev, cur};
            have_bracket = true;
            break;
        }
        if (std::abs(cur.gtd) <= -c2 * gtd0) {
            bracket = {cur, cur};
            done = true;
            break;
        }
        if (cur.gtd >= 0.0) {
            bracket = {prev, cur};
            have_bracket = true;
            break;
        }
        const double lo = cur.t + 0.01 * (cur.t - prev.t);
        const double hi = cur.t * 10.0;
        const double t = cubic_interpolate(prev.t, prev.f, prev.gtd, cur.t, cur.f, cur.gtd, lo, hi);
        prev = std::move(cur);
        cur = evaluate(t);
        ++iter;
    }
    if (!done && !have_bracket) {
        bracket = {Probe{0.0, f0, std::vector<double>(g0.begin(), g0.end()), gtd0}, cur};
    }

    // zoom
    bool insufficient = false;
    int low = bracket[0].f <= bracket[1].f ? 0 : 1;
    int high = 1 - low;
    while (!done && iter < max_evaluations) {
        const double b_min = std::min(bracket[0].t, bracket[1].t);
        const double b_max = std::max(bracket[0].t, bracket[1].t);
        if ((b_max - b_min) * d_norm < kTolChange) break;
        double t = cubic_interpolate(bracket[0].t, bracket[0].f, bracket[0].gtd, bracket[1].t, bracket[1].f,
                                     bracket[1].gtd, b_min, b_max);
        if (!std::isfinite(bracket[0].f) || !std::isfinite(bracket[1].f)) t = 0.5 * (b_min + b_max);
        const double margin = 0.1 * (b_max - b_min);
        if (std::min(b_max - t, t - b_min) < margin) {
            if (insufficient || t >= b_max || t <= b_min) {
                t = std::abs(t - b_max) < std::abs(t - b_min) ? b_max - margin : b_min + margin;
                insufficient = false;
            } else {
                insufficient = true;
            }
        } else {
            insufficient = false;
        }
        Probe p = evaluate(t);
        ++iter;
        if (!std::isfinite(p.f) || p.f > f0 + c1 * t * gtd0 || p.f >= bracket[low].f) {
            bracket[high] = std::move(p);
        } else {
            if (std::abs(p.gtd) <= -c2 * gtd0) {
                done = true;
            } else if (p.gtd * (bracket[high].t - bracket[low].t) >= 0.0) {
                bracket[high] = bracket[low];
            }
            bracket[low] = std::move(p);
        }
        low = bracket[0].f <= bracket[1].f ? 0 : 1;
        high = 1 - low;
        if (done) {
            // the accepted point is the newest low end
            break;
        }
    }
    const Probe& best = bracket[low];
    result.step = best.t;
    result.value = best.f;
    result.grad = best.g;
    result.success = done;
    return result;
}

// ---------------------------------------------------------------------------
// L-BFGS

Lbfgs::Lbfgs(LbfgsOptions options) : opt_(options) {
    EFEO_REQUIRE(opt_.learning_rate > 0.0, "lbfgs: learning rate must be positive");
    EFEO_REQUIRE(opt_.max_iterations >= 1 && opt_.max_evaluations >= 1, "lbfgs: iteration limits must be positive");
    EFEO_REQUIRE(opt_.history_size >= 1, "lbfgs: history size must be positive");
    EFEO_REQUIRE(0.0 < opt_.c1 && opt_.c1 < opt_.c2 && opt_.c2 < 1.0, "lbfgs: need 0 < c1 < c2 < 1");
}

std::vector<double> Lbfgs::apply_inverse_hessian(std::span<const double> g) const {
    std::vector<double> q(g.begin(), g.end());
    const std::size_t m = s_.size();
    std::vector<double> alpha(m);
    for (std::size_t i = m; i-- > 0;) {
        alpha[i] = rho_[i] * dot(s_[i], q);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * y_[i][j];
    }
    for (double& v : q) v *= gamma_;
    for (std::size_t i = 0; i < m; ++i) {
        const double beta = rho_[i] * dot(y_[i], q);
        for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[i] - beta) * s_[i][j];
    }
    return q;
}

StepReport Lbfgs::step(const Objective& objective, std::vector<double>& x) {
    const std::size_t n = x.size();
    StepReport rep;
    std::vector<double> g(n, 0.0);
    double loss = objective(x, g);
    ++rep.evaluations;
    rep.initial_loss = loss;
    rep.final_loss = loss;
    if (!std::isfinite(loss)) throw NumericalError("lbfgs: non-finite loss at the starting point");
    if (max_abs(g) <= opt_.tolerance_grad) return rep;

    std::vector<double> prev_g;
    std::vector<double> d(n);
    std::vector<double> s(n);
    while (rep.iterations < opt_.max_iterations) {
        ++rep.iterations;
        // A new objective (fresh batch) invalidates the gradient difference of the
        // first iteration, so pairs are only added within one call.
        if (!prev_g.empty()) {
            std::vector<double> yv(n);
            for (std::size_t i = 0; i < n; ++i) yv[i] = g[i] - prev_g[i];
            const double ys = dot(yv, s);
            if (ys > 1e-10) {
                if (static_cast<int>(s_.size()) == opt_.history_size) {
                    s_.pop_front();
                    y_.pop_front();
                    rho_.pop_front();
                }
                s_.push_back(s);
                y_.push_back(yv);
                rho_.push_back(1.0 / ys);
                gamma_ = ys / dot(yv, yv);
            }
        }
        std::vector<double> q = apply_inverse_hessian(g);
        for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];
        double t = opt_.learning_rate;
        if (first_) {
            double l1 = 0.0;
            for (double v : g) l1 += std::abs(v);
            t = std::min(1.0, 1.0 / l1) * opt_.learning_rate;
            first_ = false;
        }
        double gtd = dot(g, d);
        if (!(gtd < 0.0)) {
            // not a descent direction: drop the curvature memory and use -g
            s_.clear();
            y_.clear();
            rho_.clear();
            gamma_ = 1.0;
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            gtd = dot(g, d);
        }
        if (!(gtd < -opt_.tolerance_change)) break;
        prev_g = g;
        const double prev_loss = loss;
        const int budget = std::max(1, std::min(25, opt_.max_evaluations - rep.evaluations));
        LineSearchResult ls = strong_wolfe(objective, x, loss, g, d, t, opt_.c1, opt_.c2, budget);
        rep.evaluations += ls.evaluations;
        if (!ls.success && !(ls.value < loss)) {
            // Fallback: backtracking steepest descent from the current point.
            ++rep.line_search_failures;
            s_.clear();
            y_.clear();
            rho_.clear();
            gamma_ = 1.0;
            const double gnorm2 = dot(g, g);
            double ts = opt_.learning_rate / std::max(1.0, std::sqrt(gnorm2));
            std::vector<double> trial(n), tg(n);
            bool moved = false;
            for (int k = 0; k < 40 && rep.evaluations < opt_.max_evaluations; ++k, ts *= 0.5) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - ts * g[i];
                const double f = objective(trial, tg);
                ++rep.evaluations;
                if (std::isfinite(f) && f <= loss - opt_.c1 * ts * gnorm2) {
                    for (std::size_t i = 0; i < n; ++i) s[i] = trial[i] - x[i];
                    x = trial;
                    loss = f;
                    g = tg;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        } else {
            if (!ls.success) ++rep.line_search_failures;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = ls.step * d[i];
                x[i] += s[i];
            }
            loss = ls.value;
            g = std::move(ls.grad);
        }
        rep.final_loss = loss;
        if (rep.evaluations >= opt_.max_evaluations) break;
        if (max_abs(g) <= opt_.tolerance_grad) break;
        if (max_abs(s) <= opt_.tolerance_change) break;
        if (std::abs(loss - prev_loss) < opt_.tolerance_change) break;
    }
    rep.final_loss = loss;
    return rep;
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(AdamOptions options) : opt_(options) {
    EFEO_REQUIRE(opt_.learning_rate > 0.0, "adam: learning rate must be positive");
    EFEO_REQUIRE(opt_.max_iterations >= 1, "adam: iteration count must be positive");
}

StepReport Adam::step(const Objective& objective, std::vector<double>& x) {
    StepReport rep;
    std::vector<double> g(x.size(), 0.0);
    if (m_.size() != x.size()) {
        m_.assign(x.size(), 0.0);
        v_.assign(x.size(), 0.0);
        t_ = 0;
    }
    for (int it = 0; it < opt_.max_iterations; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        const double loss = objective(x, g);
        ++rep.evaluations;
        ++rep.iterations;
        if (!std::isfinite(loss)) throw NumericalError("adam: non-finite loss");
        if (it == 0) rep.initial_loss = loss;
        rep.final_loss = loss;
        ++t_;
        const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < x.size(); ++i) {
            m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * g[i];
            v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * g[i] * g[i];
            x[i] -= opt_.learning_rate * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + opt_.epsilon);
        }
    }
    return rep;
}

}  // namespace efeo
