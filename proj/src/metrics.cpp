#include "adaptode/metrics.hpp"

#include "adaptode/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace adaptode {

Rollout rollout(const MlpParams& p, const StatePoint& x0, std::size_t n, const SolverConfig& cfg)
{
    cfg.validate();
    if (!is_finite(x0))
        throw InvalidArgument("rollout: initial state must be finite");
    const MlpField field{&p};

    Rollout out;
    out.trajectory.x0 = x0;
    out.trajectory.meta.generator = "mlp-rollout";
    out.trajectory.points.reserve(n + 1);
    out.trajectory.points.push_back(x0);
    out.n_steps.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const StatePoint& x = out.trajectory.points.back();
        StatePoint next;
        int steps = 1;
        try {
            const StepOutcome step = fehlberg_step(field, x, cfg, cfg.h0);
            if (step.accepted) {
                next = step.a2;
            } else {
                steps = *step.n_steps;
                next = integrate_fixed_rk3(field, x, steps);
            }
        } catch (const NumericError& e) {
            throw NumericError("rollout diverged at index " + std::to_string(i) + ": " + e.what());
        }
        if (!is_finite(next))
            throw NumericError("rollout diverged at index " + std::to_string(i));
        out.trajectory.points.push_back(next);
        out.n_steps.push_back(steps);
    }
    return out;
}

std::vector<double> mse_series(std::span<const StatePoint> generated, std::span<const StatePoint> reference)
{
    if (generated.size() != reference.size())
        throw InvalidArgument("mse_series: trajectories differ in length (" + std::to_string(generated.size()) +
                              " vs " + std::to_string(reference.size()) + ")");
    std::vector<double> s(generated.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = squared_norm(generated[i] - reference[i]);
    return s;
}

std::vector<double> oracle_mse_series(std::span<const StatePoint> generated, const LorenzParams& p,
                                      double dt_phys, const Tolerance& tol)
{
    if (generated.size() < 2)
        throw InvalidArgument("oracle_mse_series: need at least two points");
    std::vector<double> s(generated.size() - 1);
    for (std::size_t i = 1; i < generated.size(); ++i) {
        try {
            s[i - 1] = squared_norm(generated[i] - lorenz_step(p, generated[i - 1], dt_phys, tol));
        } catch (const NumericError&) {
            s[i - 1] = std::numeric_limits<double>::infinity();
        }
    }
    return s;
}

EvalReport evaluate(const Trajectory& generated, const Trajectory& reference, std::span<const int> n_steps)
{
    if (!n_steps.empty() && n_steps.size() + 1 != generated.size())
        throw InvalidArgument("evaluate: step series does not match the generated trajectory");
    EvalReport r;
    r.generated = generated;
    r.mse = mse_series(generated.points, reference.points);
    r.oracle_mse = oracle_mse_series(generated.points, reference.meta.params, reference.dt_phys, reference.meta.tol);
    r.n_steps.assign(n_steps.begin(), n_steps.end());
    return r;
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw InvalidArgument("median of an empty series");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

} // namespace adaptode
