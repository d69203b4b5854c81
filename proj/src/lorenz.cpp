#include "adaptode/lorenz.hpp"

#include <string>

namespace adaptode {

void LorenzParams::validate() const
{
    if (!(sigma > 0.0) || !(rho > 0.0) || !(beta > 0.0))
        throw InvalidArgument("Lorenz parameters sigma, rho and beta must all be positive");
}

void Tolerance::validate() const
{
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw InvalidArgument("integration tolerances must be positive");
}

void validate_dataset(const Trajectory& t)
{
    if (t.points.size() < 2)
        throw InvalidArgument("a dataset needs at least two points, got " + std::to_string(t.points.size()));
    for (std::size_t i = 0; i < t.points.size(); ++i)
        if (!is_finite(t.points[i]))
            throw InvalidArgument("dataset point " + std::to_string(i) + " is not finite");
}

StatePoint lorenz_step(const LorenzParams& p, const StatePoint& x, double dt_phys, const Tolerance& tol)
{
    return dopri5_integrate([&p](const StatePoint& s) { return lorenz_field(p, s); }, x, dt_phys, tol);
}

Trajectory generate_dataset(const LorenzParams& p, const StatePoint& x0, std::size_t n, double dt_phys,
                            const Tolerance& tol)
{
    p.validate();
    tol.validate();
    if (n < 2)
        throw InvalidArgument("generate_dataset: n must be at least 2");
    if (!(dt_phys > 0.0) || !std::isfinite(dt_phys))
        throw InvalidArgument("generate_dataset: dt_phys must be positive");
    if (!is_finite(x0))
        throw InvalidArgument("generate_dataset: initial condition must be finite");

    Trajectory out;
    out.dt_phys = dt_phys;
    out.x0 = x0;
    out.meta = GenerationMeta{"dopri5", tol, p};
    out.points.reserve(n);
    out.points.push_back(x0);
    for (std::size_t i = 1; i < n; ++i) {
        try {
            out.points.push_back(lorenz_step(p, out.points.back(), dt_phys, tol));
        } catch (const NumericError& e) {
            throw NumericError("generate_dataset: point " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

} // namespace adaptode
