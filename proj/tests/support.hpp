#pragma once

#include "adaptode/lorenz.hpp"
#include "adaptode/rng.hpp"
#include "adaptode/state.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace testing {

using adaptode::StatePoint;

// Small deterministic generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : key_(adaptode::rng::stream_key(seed, 0x7e57)) {}

    std::uint64_t bits() { return adaptode::rng::at(key_, counter_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * adaptode::rng::unit_open(bits()); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(bits() % n); }
    StatePoint point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Classical RK4 with a fixed step; the fine-step reference for the Lorenz field.
template <class F>
StatePoint rk4(const F& f, StatePoint x, double t_span, double h)
{
    const auto n = static_cast<long>(std::llround(t_span / h));
    const double dt = t_span / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
        const StatePoint k1 = f(x);
        const StatePoint k2 = f(x + (dt / 2) * k1);
        const StatePoint k3 = f(x + (dt / 2) * k2);
        const StatePoint k4 = f(x + dt * k3);
        x = x + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

inline StatePoint lorenz_rk4(const StatePoint& x, double t_span, double h = 1e-6)
{
    const adaptode::LorenzParams p;
    return rk4([&](const StatePoint& y) { return adaptode::lorenz_field(p, y); }, x, t_span, h);
}

struct Constant {
    StatePoint c;
    StatePoint operator()(const StatePoint&) const { return c; }
};

// x' = a x on every coordinate.
struct Scalar {
    double a;
    StatePoint operator()(const StatePoint& x) const { return a * x; }
};

using Mat3 = std::array<std::array<double, 3>, 3>;

inline StatePoint apply(const Mat3& a, const StatePoint& x)
{
    StatePoint y{};
    for (int i = 0; i < 3; ++i)
        y[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
    return y;
}

struct Linear {
    Mat3 a;
    StatePoint operator()(const StatePoint& x) const { return apply(a, x); }
};

inline double max_abs_diff(const StatePoint& a, const StatePoint& b)
{
    return std::max({std::abs(a.x1 - b.x1), std::abs(a.x2 - b.x2), std::abs(a.x3 - b.x3)});
}

// Least-squares slope of log(ys) against log(xs).
template <class Xs, class Ys>
double loglog_slope(const Xs& xs, const Ys& ys)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace testing
