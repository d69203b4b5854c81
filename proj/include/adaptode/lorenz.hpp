#pragma once

#include "adaptode/error.hpp"
#include "adaptode/state.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

namespace adaptode {

/// Any callable mapping a state to its time derivative.
template <class F>
concept VectorField = requires(const F& f, const StatePoint& x) {
    { f(x) } -> std::convertible_to<StatePoint>;
};

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;

    void validate() const;
};

/// Right-hand side of the Lorenz'63 system.
constexpr StatePoint lorenz_field(const LorenzParams& p, const StatePoint& x) noexcept
{
    return {p.sigma * (x.x2 - x.x1), x.x1 * (p.rho - x.x3) - x.x2, x.x1 * x.x2 - p.beta * x.x3};
}

/// Mixed absolute/relative tolerance for the Dormand-Prince controller.
struct Tolerance {
    double rtol = 1e-8;
    double atol = 1e-10;

    void validate() const;
};

struct GenerationMeta {
    std::string generator = "dopri5";
    Tolerance tol{};
    LorenzParams params{};
};

/// Ordered samples of a trajectory. Sample i sits at solver time i; the
/// physical time between consecutive samples is dt_phys.
struct Trajectory {
    std::vector<StatePoint> points;
    double dt_phys = 0.01;
    StatePoint x0{};
    GenerationMeta meta{};

    std::size_t size() const noexcept { return points.size(); }
};

/// Throws InvalidArgument unless the trajectory is usable as a dataset
/// (at least two points, all finite).
void validate_dataset(const Trajectory& t);

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b*, the difference between the 5th and embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 5.0;
inline constexpr double kUnderflowRatio = 1e-14;
inline constexpr long kMaxSteps = 100000;

} // namespace detail

/// Integrates `field` from x over a time span with the Dormand-Prince 5(4)
/// pair, returning the fifth-order solution. Throws NumericError when the
/// step size underflows, the step budget runs out, or the state stops being
/// finite.
template <VectorField F>
StatePoint dopri5_integrate(const F& field, StatePoint x, double t_span, const Tolerance& tol)
{
    using namespace detail;
    if (!(t_span > 0.0) || !std::isfinite(t_span))
        throw InvalidArgument("dopri5_integrate: t_span must be positive and finite");
    tol.validate();
    if (!is_finite(x))
        throw NumericError("dopri5_integrate: non-finite initial state");

    const double h_min = kUnderflowRatio * t_span;
    double t = 0.0;
    double h = t_span;
    StatePoint k1 = field(x);
    for (long attempts = 0; t < t_span; ++attempts) {
        if (attempts == kMaxSteps)
            throw NumericError("dopri5_integrate: step budget exhausted at t=" + std::to_string(t));
        bool last = false;
        if (t + h >= t_span) {
            h = t_span - t;
            last = true;
        }
        if (h < h_min)
            throw NumericError("dopri5_integrate: step size underflow (h=" + std::to_string(h) + ")");

        const StatePoint k2 = field(x + (h * a21) * k1);
        const StatePoint k3 = field(x + h * (a31 * k1 + a32 * k2));
        const StatePoint k4 = field(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const StatePoint k5 = field(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const StatePoint k6 = field(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const StatePoint y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const StatePoint k7 = field(y);
        const StatePoint err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double sum = 0.0;
        for (std::size_t i = 0; i < kStateDim; ++i) {
            const double scale = tol.atol + tol.rtol * std::max(std::abs(x[i]), std::abs(y[i]));
            const double q = err[i] / scale;
            sum += q * q;
        }
        const double err_norm = std::sqrt(sum / static_cast<double>(kStateDim));
        if (!std::isfinite(err_norm) || !is_finite(y)) {
            h *= kMinFactor;
            continue;
        }

        double factor = err_norm == 0.0 ? kMaxFactor : kSafety * std::pow(err_norm, -0.2);
        factor = std::clamp(factor, kMinFactor, kMaxFactor);
        if (err_norm <= 1.0) {
            t = last ? t_span : t + h;
            x = y;
            k1 = k7;
            h *= factor;
        } else {
            h *= std::min(factor, 1.0);
        }
    }
    return x;
}

/// Samples n points of the Lorenz system starting at x0, spaced dt_phys apart.
Trajectory generate_dataset(const LorenzParams& p, const StatePoint& x0, std::size_t n = 5000,
                            double dt_phys = 0.01, const Tolerance& tol = {});

/// One high-accuracy Lorenz step of physical length dt_phys.
StatePoint lorenz_step(const LorenzParams& p, const StatePoint& x, double dt_phys, const Tolerance& tol);

} // namespace adaptode
