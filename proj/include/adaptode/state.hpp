#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace adaptode {

/// A point of the three-dimensional state space.
struct StatePoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    constexpr double& operator[](std::size_t i) noexcept { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
    constexpr double operator[](std::size_t i) const noexcept { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

    friend constexpr bool operator==(const StatePoint&, const StatePoint&) = default;

    constexpr StatePoint& operator+=(const StatePoint& o) noexcept
    {
        x1 += o.x1;
        x2 += o.x2;
        x3 += o.x3;
        return *this;
    }
    constexpr StatePoint& operator-=(const StatePoint& o) noexcept
    {
        x1 -= o.x1;
        x2 -= o.x2;
        x3 -= o.x3;
        return *this;
    }
};

inline constexpr std::size_t kStateDim = 3;

constexpr StatePoint operator+(StatePoint a, const StatePoint& b) noexcept { return a += b; }
constexpr StatePoint operator-(StatePoint a, const StatePoint& b) noexcept { return a -= b; }
constexpr StatePoint operator*(double s, const StatePoint& a) noexcept { return {s * a.x1, s * a.x2, s * a.x3}; }

constexpr double dot(const StatePoint& a, const StatePoint& b) noexcept
{
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

constexpr double squared_norm(const StatePoint& a) noexcept { return dot(a, a); }

inline double norm(const StatePoint& a) noexcept { return std::sqrt(squared_norm(a)); }

inline bool is_finite(const StatePoint& a) noexcept
{
    return std::isfinite(a.x1) && std::isfinite(a.x2) && std::isfinite(a.x3);
}

} // namespace adaptode
