#pragma once

#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace efeo {

/// Returns f(x) and writes grad f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    double learning_rate = 0.1;   ///< initial trial step for the line search
    int max_iterations = 100;     ///< per call to step()
    int max_evaluations = 125;    ///< per call to step()
    int history_size = 100;
    double tolerance_grad = 1e-10;
    double tolerance_change = 1e-14;
    double c1 = 1e-4;             ///< sufficient decrease
    double c2 = 0.9;              ///< curvature
};

struct StepReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    int iterations = 0;
    int evaluations = 0;
    int line_search_failures = 0;  ///< iterations that fell back to steepest descent
};

/// Limited-memory BFGS with the two-loop recursion and a strong-Wolfe line
/// search (bracketing plus cubic-interpolation zoom). Curvature pairs persist
/// across step() calls, so the objective may change between calls (new batches).
class Lbfgs {
public:
    explicit Lbfgs(LbfgsOptions options = {});

    StepReport step(const Objective& objective, std::vector<double>& x);
    std::size_t history_length() const { return s_.size(); }
    const LbfgsOptions& options() const { return opt_; }

    /// Applies the inverse-Hessian approximation to g (two-loop recursion).
    std::vector<double> apply_inverse_hessian(std::span<const double> g) const;

private:
    LbfgsOptions opt_;
    std::deque<std::vector<double>> s_;
    std::deque<std::vector<double>> y_;
    std::deque<double> rho_;
    double gamma_ = 1.0;
    bool first_ = true;
};

struct LineSearchResult {
    double step = 0.0;
    double value = 0.0;
    std::vector<double> grad;
    int evaluations = 0;
    bool success = false;
};

/// Strong Wolfe search along d from x (f0, g0 given). Returns the best point
/// found; success is false when the Wolfe conditions could not be met.
LineSearchResult strong_wolfe(const Objective& objective, std::span<const double> x, double f0,
                              std::span<const double> g0, std::span<const double> d, double t0,
                              double c1, double c2, int max_evaluations = 25);

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_iterations = 1;  ///< per call to step()
};

class Adam {
public:
    explicit Adam(AdamOptions options = {});
    StepReport step(const Objective& objective, std::vector<double>& x);

private:
    AdamOptions opt_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

}  // namespace efeo
