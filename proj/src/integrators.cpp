#include "adaptode/integrators.hpp"

#include <cmath>

namespace adaptode {

void SolverConfig::validate() const
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw InvalidArgument("solver eps must be positive");
    if (!(safety > 0.0) || safety > 1.0)
        throw InvalidArgument("solver safety factor must lie in (0, 1]");
    if (h0 != 1.0)
        throw InvalidArgument("solver initial step must be 1");
    if (!(h_clip > 0.0) || h_clip > 1.0)
        throw InvalidArgument("solver h_clip must lie in (0, 1]");
}

int SolverConfig::max_substeps() const { return static_cast<int>(std::ceil(1.0 / h_clip)); }

StepDecision decide_step(double r, double h, const SolverConfig& cfg)
{
    if (std::isnan(r))
        throw NumericError("error rate is NaN");
    if (r < 0.0)
        throw InvalidArgument("error rate must be non-negative");
    if (r < cfg.eps)
        return {};
    StepDecision d;
    d.accepted = false;
    d.h_new = cfg.safety * h * std::sqrt(cfg.eps / r);
    d.n_steps = static_cast<int>(std::ceil(1.0 / std::max(*d.h_new, cfg.h_clip)));
    return d;
}

} // namespace adaptode
