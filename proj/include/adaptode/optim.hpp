#pragma once

#include "adaptode/net.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace adaptode {

struct LbfgsConfig {
    double lr = 1.0;          ///< initial trial step scale
    int max_iter = 20;        ///< quasi-Newton iterations per minimize call
    int max_eval = 25;        ///< objective evaluations per minimize call
    double tol_grad = 1e-5;   ///< stop when max |g_i| falls below this
    double tol_change = 1e-9; ///< stop when the loss or the step stalls below this
    int history = 100;        ///< stored curvature pairs
    double c1 = 1e-4;         ///< sufficient decrease constant
    double c2 = 0.9;          ///< curvature constant

    void validate() const;
};

/// Evaluates the objective at x, writes the gradient into grad and returns the
/// value. May return +inf (with any gradient) to signal an unusable point
/// during a line search.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Data of one line search, enough to re-check the strong Wolfe conditions.
struct LineSearchRecord {
    double step = 0.0;   ///< accepted step length t along d
    double f0 = 0.0;     ///< value at the start
    double dg0 = 0.0;    ///< directional derivative g0.d at the start
    double f = 0.0;      ///< value at x + t d
    double dg = 0.0;     ///< directional derivative at x + t d
    int evaluations = 0;
    bool wolfe = false;  ///< false when the budget ran out or the bracket collapsed
};

enum class LbfgsStop {
    gradient,     ///< max |g| <= tol_grad
    change,       ///< loss or step change below tol_change
    max_iter,
    max_eval,
    line_search,  ///< no decrease could be found
};

struct LbfgsTrace {
    std::vector<double> losses;           ///< value at the start, then after each iteration
    std::vector<LineSearchRecord> steps;  ///< one per iteration
    int evaluations = 0;
    bool line_search_failed = false;
    LbfgsStop stop = LbfgsStop::max_iter;
};

/// Memory of the optimizer, carried across minimize calls.
struct LbfgsState {
    std::deque<std::vector<double>> s;  ///< parameter differences, oldest first
    std::deque<std::vector<double>> y;  ///< gradient differences, oldest first
    std::vector<double> prev_grad;
    std::vector<double> direction;
    double step = 0.0;
    double h_diag = 1.0;
    long iterations = 0;
    long evaluations = 0;
};

/// Limited-memory BFGS with a strong Wolfe line search. Each minimize call runs
/// at most max_iter iterations and max_eval objective evaluations; curvature
/// information persists between calls.
class Lbfgs {
public:
    explicit Lbfgs(LbfgsConfig cfg = {});

    LbfgsTrace minimize(const Objective& objective, std::vector<double>& x);

    const LbfgsConfig& config() const noexcept { return cfg_; }
    const LbfgsState& state() const noexcept { return state_; }

private:
    std::vector<double> two_loop(std::span<const double> g) const;

    LbfgsConfig cfg_;
    LbfgsState state_;
};

/// One minimize call on a network's parameters.
struct LbfgsResult {
    MlpParams params;
    LbfgsTrace trace;
};

using ParamObjective = std::function<double(const MlpParams& p, Gradient& grad)>;

LbfgsResult lbfgs_minimize(const ParamObjective& objective, const MlpParams& p0, const LbfgsConfig& cfg = {});

} // namespace adaptode
