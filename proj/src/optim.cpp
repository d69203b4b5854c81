#include "adaptode/optim.hpp"

#include "adaptode/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace adaptode {

void LbfgsConfig::validate() const
{
    if (!(lr > 0.0))
        throw InvalidArgument("L-BFGS lr must be positive");
    if (max_iter < 1 || max_eval < 1)
        throw InvalidArgument("L-BFGS iteration and evaluation budgets must be at least 1");
    if (!(tol_grad > 0.0) || !(tol_change > 0.0))
        throw InvalidArgument("L-BFGS tolerances must be positive");
    if (history < 1)
        throw InvalidArgument("L-BFGS history must be at least 1");
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
        throw InvalidArgument("line search constants must satisfy 0 < c1 < c2 < 1");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

double l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Minimizer of the cubic interpolating (x1, f1, g1) and (x2, f2, g2), clamped
// to [lo, hi]; the midpoint when the cubic has no minimizer or the data are
// unusable.
double cubic_minimizer(double x1, double f1, double g1, double x2, double f2, double g2, double lo, double hi)
{
    const double mid = 0.5 * (lo + hi);
    if (!std::isfinite(f1) || !std::isfinite(f2) || !std::isfinite(g1) || !std::isfinite(g2) || x1 == x2)
        return mid;
    const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    const double d2_sq = d1 * d1 - g1 * g2;
    if (!(d2_sq >= 0.0))
        return mid;
    const double d2 = std::sqrt(d2_sq);
    double t;
    if (x1 <= x2)
        t = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2));
    else
        t = x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
    if (!std::isfinite(t))
        return mid;
    return std::clamp(t, lo, hi);
}

struct Probe {
    double t = 0.0;
    double f = 0.0;
    double dg = 0.0;
    std::vector<double> g;
};

struct LineSearchResult {
    Probe point;
    int evaluations = 0;
    bool wolfe = false;
};

// Strong Wolfe line search: bracketing by cubic extrapolation, then zoom by
// safeguarded cubic interpolation (Nocedal & Wright, algorithms 3.5 and 3.6).
LineSearchResult strong_wolfe(const Objective& objective, std::span<const double> x, std::span<const double> d,
                              const Probe& start, double t, const LbfgsConfig& cfg, int budget)
{
    const double d_norm = max_abs(d);
    std::vector<double> trial(x.size());
    LineSearchResult res;

    auto eval = [&](double step) {
        Probe p;
        p.t = step;
        p.g.assign(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            trial[i] = x[i] + step * d[i];
        p.f = objective(trial, p.g);
        p.dg = std::isfinite(p.f) ? dot(p.g, d) : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(p.f))
            p.f = std::numeric_limits<double>::infinity();
        ++res.evaluations;
        return p;
    };
    auto armijo_fails = [&](const Probe& p) { return p.f > start.f + cfg.c1 * p.t * start.dg; };
    auto curvature_holds = [&](const Probe& p) { return std::abs(p.dg) <= -cfg.c2 * start.dg; };

    Probe prev = start;
    Probe cur = eval(t);
    Probe lo, hi;
    bool have_bracket = false;
    int iter = 0;
    while (res.evaluations < budget) {
        if (armijo_fails(cur) || (iter > 0 && cur.f >= prev.f)) {
            lo = prev;
            hi = cur;
            have_bracket = true;
            break;
        }
        if (curvature_holds(cur)) {
            res.point = std::move(cur);
            res.wolfe = true;
            return res;
        }
        if (cur.dg >= 0.0) {
            lo = cur;
            hi = prev;
            have_bracket = true;
            break;
        }
        const double next = cubic_minimizer(prev.t, prev.f, prev.dg, cur.t, cur.f, cur.dg,
                                            cur.t + 0.01 * (cur.t - prev.t), 10.0 * cur.t);
        prev = std::move(cur);
        cur = eval(next);
        ++iter;
    }
    if (!have_bracket) {
        // Budget exhausted while extrapolating.
        if (armijo_fails(cur) || !(cur.f < prev.f)) {
            lo = prev;
            hi = cur;
        } else {
            lo = cur;
            hi = prev;
        }
        if (!armijo_fails(lo) && curvature_holds(lo) && lo.t > 0.0) {
            res.point = std::move(lo);
            res.wolfe = true;
            return res;
        }
        res.point = std::move(lo);
        return res;
    }

    // Zoom: lo always satisfies sufficient decrease and has the lowest value
    // seen in the bracket.
    bool insufficient_progress = false;
    while (res.evaluations < budget) {
        if (std::abs(hi.t - lo.t) * d_norm < cfg.tol_change)
            break;
        const double bmin = std::min(lo.t, hi.t);
        const double bmax = std::max(lo.t, hi.t);
        double step = cubic_minimizer(lo.t, lo.f, lo.dg, hi.t, hi.f, hi.dg, bmin, bmax);
        const double margin = 0.1 * (bmax - bmin);
        if (std::min(bmax - step, step - bmin) < margin) {
            if (insufficient_progress || step >= bmax || step <= bmin) {
                step = std::abs(step - bmax) < std::abs(step - bmin) ? bmax - margin : bmin + margin;
                insufficient_progress = false;
            } else {
                insufficient_progress = true;
            }
        } else {
            insufficient_progress = false;
        }
        Probe p = eval(step);
        if (armijo_fails(p) || p.f >= lo.f) {
            hi = std::move(p);
        } else {
            if (curvature_holds(p)) {
                res.point = std::move(p);
                res.wolfe = true;
                return res;
            }
            if (p.dg * (hi.t - lo.t) >= 0.0)
                hi = lo;
            lo = std::move(p);
        }
    }
    res.point = std::move(lo);
    return res;
}

} // namespace

Lbfgs::Lbfgs(LbfgsConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<double> Lbfgs::two_loop(std::span<const double> g) const
{
    const std::size_t m = state_.s.size();
    std::vector<double> q(g.begin(), g.end());
    for (double& v : q)
        v = -v;
    std::vector<double> alpha(m), rho(m);
    for (std::size_t i = m; i-- > 0;) {
        rho[i] = 1.0 / dot(state_.y[i], state_.s[i]);
        alpha[i] = rho[i] * dot(state_.s[i], q);
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] -= alpha[i] * state_.y[i][k];
    }
    for (double& v : q)
        v *= state_.h_diag;
    for (std::size_t i = 0; i < m; ++i) {
        const double beta = rho[i] * dot(state_.y[i], q);
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] += state_.s[i][k] * (alpha[i] - beta);
    }
    return q;
}

LbfgsTrace Lbfgs::minimize(const Objective& objective, std::vector<double>& x)
{
    LbfgsTrace trace;
    std::vector<double> g(x.size(), 0.0);
    double f = objective(x, g);
    trace.evaluations = 1;
    ++state_.evaluations;
    if (!std::isfinite(f))
        throw NumericError("L-BFGS: objective is not finite at the starting point");
    trace.losses.push_back(f);
    if (max_abs(g) <= cfg_.tol_grad) {
        trace.stop = LbfgsStop::gradient;
        return trace;
    }

    // Curvature pairs are only formed between evaluations of this call's
    // objective; stored history carries over from earlier calls.
    bool have_prev = false;
    int iter = 0;
    while (true) {
        ++iter;
        ++state_.iterations;
        if (have_prev) {
            std::vector<double> y(g.size()), s(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                y[i] = g[i] - state_.prev_grad[i];
                s[i] = state_.step * state_.direction[i];
            }
            const double ys = dot(y, s);
            if (ys > 1e-10 * l2(s) * l2(y)) {
                if (static_cast<int>(state_.s.size()) == cfg_.history) {
                    state_.s.pop_front();
                    state_.y.pop_front();
                }
                state_.h_diag = ys / dot(y, y);
                state_.s.push_back(std::move(s));
                state_.y.push_back(std::move(y));
            }
        }
        std::vector<double> d = two_loop(g);
        double gtd = dot(g, d);
        if (!(gtd < 0.0)) {
            // Not a descent direction: restart from steepest descent.
            state_.s.clear();
            state_.y.clear();
            state_.h_diag = 1.0;
            d.assign(g.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i)
                d[i] = -g[i];
            gtd = dot(g, d);
        }
        state_.prev_grad = g;
        const double prev_f = f;

        double t = cfg_.lr;
        if (state_.iterations == 1) {
            double g1 = 0.0;
            for (double v : g)
                g1 += std::abs(v);
            t = std::min(1.0, 1.0 / g1) * cfg_.lr;
        }
        if (gtd > -cfg_.tol_change) {
            trace.stop = LbfgsStop::change;
            break;
        }

        Probe start;
        start.f = f;
        start.dg = gtd;
        const int budget = cfg_.max_eval - trace.evaluations;
        if (budget <= 0) {
            trace.stop = LbfgsStop::max_eval;
            break;
        }
        LineSearchResult ls = strong_wolfe(objective, x, d, start, t, cfg_, budget);
        trace.evaluations += ls.evaluations;
        state_.evaluations += ls.evaluations;

        LineSearchRecord rec;
        rec.step = ls.point.t;
        rec.f0 = f;
        rec.dg0 = gtd;
        rec.f = ls.point.f;
        rec.dg = ls.point.dg;
        rec.evaluations = ls.evaluations;
        rec.wolfe = ls.wolfe;

        if (!(ls.point.t > 0.0) || !(ls.point.f <= f)) {
            trace.line_search_failed = true;
            trace.stop = LbfgsStop::line_search;
            rec.step = 0.0;
            rec.f = f;
            rec.dg = gtd;
            trace.steps.push_back(rec);
            break;
        }
        trace.steps.push_back(rec);

        t = ls.point.t;
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += t * d[i];
        f = ls.point.f;
        g = std::move(ls.point.g);
        state_.direction = std::move(d);
        state_.step = t;
        have_prev = true;
        trace.losses.push_back(f);

        if (!ls.wolfe) {
            trace.line_search_failed = true;
            trace.stop = LbfgsStop::line_search;
            break;
        }
        if (iter == cfg_.max_iter) {
            trace.stop = LbfgsStop::max_iter;
            break;
        }
        if (trace.evaluations >= cfg_.max_eval) {
            trace.stop = LbfgsStop::max_eval;
            break;
        }
        if (max_abs(g) <= cfg_.tol_grad) {
            trace.stop = LbfgsStop::gradient;
            break;
        }
        if (max_abs(state_.direction) * t <= cfg_.tol_change || std::abs(f - prev_f) < cfg_.tol_change) {
            trace.stop = LbfgsStop::change;
            break;
        }
    }
    return trace;
}

LbfgsResult lbfgs_minimize(const ParamObjective& objective, const MlpParams& p0, const LbfgsConfig& cfg)
{
    Lbfgs opt(cfg);
    MlpParams work = p0;
    Gradient grad(p0.dims());
    const Objective flat = [&](std::span<const double> x, std::span<double> g) {
        std::copy(x.begin(), x.end(), work.values().begin());
        const double f = objective(work, grad);
        std::copy(grad.values().begin(), grad.values().end(), g.begin());
        return f;
    };
    std::vector<double> x(p0.values().begin(), p0.values().end());
    LbfgsTrace trace = opt.minimize(flat, x);
    MlpParams out = p0;
    std::copy(x.begin(), x.end(), out.values().begin());
    return {std::move(out), std::move(trace)};
}

} // namespace adaptode
