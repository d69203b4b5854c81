#pragma once

#include "adaptode/integrators.hpp"
#include "adaptode/lorenz.hpp"
#include "adaptode/net.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace adaptode {

struct Rollout {
    Trajectory trajectory;   ///< n + 1 points, the first being x0
    std::vector<int> n_steps; ///< integration steps used for points 1..n
};

/// Closed-loop generation: each point is predicted from the previous
/// prediction with one adaptive Fehlberg step (error rate from the RK2/RK3
/// pair); a rejected step is recomputed with its own clipped substep count.
/// Throws NumericError naming the index at which the state blew up.
Rollout rollout(const MlpParams& p, const StatePoint& x0, std::size_t n, const SolverConfig& cfg);

/// s[i] = |generated[i] - reference[i]|^2.
std::vector<double> mse_series(std::span<const StatePoint> generated, std::span<const StatePoint> reference);

/// s[i-1] = |generated[i] - L(generated[i-1])|^2 for i >= 1, where L is one
/// Dormand-Prince Lorenz step of length dt_phys. Entries whose step cannot be
/// computed (the state is too far off the attractor) are +inf.
std::vector<double> oracle_mse_series(std::span<const StatePoint> generated, const LorenzParams& p,
                                      double dt_phys, const Tolerance& tol);

/// The time series of a generated trajectory against its reference.
struct EvalReport {
    Trajectory generated;
    std::vector<double> mse;        ///< one per point
    std::vector<double> oracle_mse; ///< one per point from index 1
    std::vector<int> n_steps;       ///< one per point from index 1; empty when unknown
};

/// Uses the reference's Lorenz parameters, dt_phys and tolerances for the
/// oracle series. `n_steps` may be empty or have generated.size() - 1 entries.
EvalReport evaluate(const Trajectory& generated, const Trajectory& reference, std::span<const int> n_steps = {});

/// Half-open index windows of the default report slices.
inline constexpr std::pair<std::size_t, std::size_t> kReportWindows[] = {{0, 600}, {600, 1200}, {2000, 2600}};

double median(std::vector<double> values);

} // namespace adaptode
