#pragma once

#include "adaptode/error.hpp"
#include "adaptode/lorenz.hpp"
#include "adaptode/state.hpp"

#include <optional>
#include <string>

namespace adaptode {

/// Configuration of the embedded Fehlberg 3(2) controller.
struct SolverConfig {
    double eps = 0.1;    ///< tolerance on the error rate r
    double safety = 0.9; ///< S in h' = S h sqrt(eps / r)
    double h0 = 1.0;     ///< initial step; one step spans the whole inter-sample interval
    double h_clip = 0.1; ///< lower clip on h', i.e. at most ceil(1/h_clip) substeps

    void validate() const;
    int max_substeps() const;
};

/// The three field evaluations shared by the RK2 and RK3 hypotheses.
struct StageEvals {
    StatePoint f1;
    StatePoint f2;
    StatePoint f3;
};

/// Result of one accept/reject decision on an error rate.
struct StepDecision {
    bool accepted = true;
    std::optional<double> h_new;  ///< raw proposed step, set iff rejected
    std::optional<int> n_steps;   ///< ceil(1 / max(h_new, h_clip)), set iff rejected
};

struct StepOutcome {
    StatePoint a1;     ///< Heun (RK2) hypothesis
    StatePoint a2;     ///< RK3 hypothesis
    double r = 0.0;    ///< error rate |A1 - A2| / h
    bool accepted = true;
    std::optional<double> h_new;
    std::optional<int> n_steps;
    StageEvals evals;
};

/// Accepts iff r < eps; otherwise proposes h' = S h sqrt(eps / r) and the
/// clipped substep count over the unit interval.
StepDecision decide_step(double r, double h, const SolverConfig& cfg);

namespace rk {

// Per-component formulas. The batched training path calls the same helpers so
// both paths round identically.
constexpr double heun_stage(double x, double h, double f1) noexcept { return x + h * f1; }
constexpr double rk3_stage(double x, double h, double f1, double f2) noexcept { return x + (h / 4.0) * (f1 + f2); }
constexpr double rk2_combine(double x, double h, double f1, double f2) noexcept { return x + (h / 2.0) * (f1 + f2); }
constexpr double rk3_combine(double x, double h, double f1, double f2, double f3) noexcept
{
    return x + (h / 6.0) * ((f1 + f2) + 4.0 * f3);
}

inline StatePoint heun_stage(const StatePoint& x, double h, const StatePoint& f1) noexcept
{
    return {heun_stage(x.x1, h, f1.x1), heun_stage(x.x2, h, f1.x2), heun_stage(x.x3, h, f1.x3)};
}
inline StatePoint rk3_stage(const StatePoint& x, double h, const StatePoint& f1, const StatePoint& f2) noexcept
{
    return {rk3_stage(x.x1, h, f1.x1, f2.x1), rk3_stage(x.x2, h, f1.x2, f2.x2), rk3_stage(x.x3, h, f1.x3, f2.x3)};
}
inline StatePoint rk2_combine(const StatePoint& x, double h, const StatePoint& f1, const StatePoint& f2) noexcept
{
    return {rk2_combine(x.x1, h, f1.x1, f2.x1), rk2_combine(x.x2, h, f1.x2, f2.x2),
            rk2_combine(x.x3, h, f1.x3, f2.x3)};
}
inline StatePoint rk3_combine(const StatePoint& x, double h, const StatePoint& f1, const StatePoint& f2,
                              const StatePoint& f3) noexcept
{
    return {rk3_combine(x.x1, h, f1.x1, f2.x1, f3.x1), rk3_combine(x.x2, h, f1.x2, f2.x2, f3.x2),
            rk3_combine(x.x3, h, f1.x3, f2.x3, f3.x3)};
}

template <VectorField F>
StatePoint checked_eval(const F& field, const StatePoint& x, const char* which)
{
    StatePoint f = field(x);
    if (!is_finite(f))
        throw NumericError(std::string("non-finite vector field value at evaluation ") + which);
    return f;
}

template <VectorField F>
StageEvals evaluate_stages(const F& field, const StatePoint& x, double h)
{
    StageEvals s;
    s.f1 = checked_eval(field, x, "f1");
    s.f2 = checked_eval(field, heun_stage(x, h, s.f1), "f2");
    s.f3 = checked_eval(field, rk3_stage(x, h, s.f1, s.f2), "f3");
    return s;
}

inline void require_step(const StatePoint& x, double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidArgument("step size must be positive and finite");
    if (!is_finite(x))
        throw NumericError("non-finite state passed to a Runge-Kutta step");
}

} // namespace rk

/// Heun's method: x + h/2 (f1 + f2), f2 evaluated at x + h f1.
template <VectorField F>
StatePoint rk2_step(const F& field, const StatePoint& x, double h)
{
    rk::require_step(x, h);
    const StatePoint f1 = rk::checked_eval(field, x, "f1");
    const StatePoint f2 = rk::checked_eval(field, rk::heun_stage(x, h, f1), "f2");
    return rk::rk2_combine(x, h, f1, f2);
}

/// Fehlberg's third-order step: x + h/6 (f1 + f2 + 4 f3).
template <VectorField F>
StatePoint rk3_step(const F& field, const StatePoint& x, double h)
{
    rk::require_step(x, h);
    const StageEvals s = rk::evaluate_stages(field, x, h);
    return rk::rk3_combine(x, h, s.f1, s.f2, s.f3);
}

/// Evaluates both hypotheses from one set of stages and decides whether the
/// RK3 one is accepted. On rejection the caller re-integrates with
/// `n_steps` substeps; this function never does so itself.
template <VectorField F>
StepOutcome fehlberg_step(const F& field, const StatePoint& x, const SolverConfig& cfg, double h)
{
    rk::require_step(x, h);
    StepOutcome out;
    out.evals = rk::evaluate_stages(field, x, h);
    const auto& [f1, f2, f3] = out.evals;
    out.a1 = rk::rk2_combine(x, h, f1, f2);
    out.a2 = rk::rk3_combine(x, h, f1, f2, f3);
    out.r = norm(out.a1 - out.a2) / h;
    const StepDecision d = decide_step(out.r, h, cfg);
    out.accepted = d.accepted;
    out.h_new = d.h_new;
    out.n_steps = d.n_steps;
    return out;
}

/// n uniform RK3 substeps of size 1/n across the unit interval.
template <VectorField F>
StatePoint integrate_fixed_rk3(const F& field, StatePoint x, int n_steps)
{
    if (n_steps < 1)
        throw InvalidArgument("integrate_fixed_rk3: n_steps must be at least 1");
    const double h = 1.0 / n_steps;
    for (int i = 0; i < n_steps; ++i)
        x = rk3_step(field, x, h);
    return x;
}

} // namespace adaptode
