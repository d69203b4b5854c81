// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "adaptode/integrators.hpp"
#include "adaptode/lorenz.hpp"
#include "adaptode/metrics.hpp"
#include "adaptode/net.hpp"
#include "adaptode/optim.hpp"
#include "adaptode/training.hpp"
#include "cli_runner.hpp"
#include "gradcheck.hpp"
#include "support.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace adaptode;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            failures += " [failed: " + what + "]";
        }
    }
};

const Trajectory& dataset()
{
    static const Trajectory t = generate_dataset({}, {1, 1, 1});
    return t;
}

struct Run {
    TrainResult result;
    Rollout rollout;
    double seconds = 0.0;
};

Run train_and_roll(TrainMode mode, double eps, int epochs)
{
    const auto start = std::chrono::steady_clock::now();
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.epochs = epochs;
    cfg.solver.eps = eps;
    Run run;
    run.result = train(dataset(), cfg);
    run.rollout = rollout(run.result.model, dataset().points.front(), 2600, cfg.solver);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

std::string fmt(double v, int precision = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// 1 -------------------------------------------------------------------------
Verdict solver_algebra()
{
    Verdict v;
    const StepOutcome o = fehlberg_step(testing::Scalar{1}, {1, 0, 0}, SolverConfig{}, 1.0);
    const double h_expected = 0.9 * std::sqrt(0.6);
    v.require(std::abs(o.a1.x1 - 2.5) <= 1e-12, "A1");
    v.require(std::abs(o.a2.x1 - 8.0 / 3.0) <= 1e-12, "A2");
    v.require(std::abs(o.r - 1.0 / 6.0) <= 1e-12, "r");
    v.require(!o.accepted, "rejection");
    v.require(o.h_new && std::abs(*o.h_new - h_expected) <= 1e-12 && std::abs(*o.h_new - 0.69714) < 5e-6, "h'");
    v.require(o.n_steps == 2, "n");
    v.detail << "A1=" << fmt(o.a1.x1, 17) << " A2=" << fmt(o.a2.x1, 17) << " r=" << fmt(o.r, 17)
             << " h'=" << fmt(o.h_new.value_or(NAN), 17) << " n=" << o.n_steps.value_or(0);
    return v;
}

// 2 -------------------------------------------------------------------------
Verdict order_properties()
{
    Verdict v;
    const LorenzParams p;
    const auto field = [&](const StatePoint& x) { return lorenz_field(p, x); };
    const std::array<double, 4> hs{0.04, 0.02, 0.01, 0.005};
    testing::Gen gen(2);
    double lo2 = INFINITY, hi2 = -INFINITY, lo3 = INFINITY, hi3 = -INFINITY, lor = INFINITY, hir = -INFINITY;
    for (int trial = 0; trial < 5; ++trial) {
        const StatePoint x = dataset().points[100 + gen.index(4800)];
        std::vector<double> e2, e3, rs;
        for (double h : hs) {
            const StatePoint ref = testing::rk4(field, x, h, 1e-6);
            e2.push_back(norm(rk2_step(field, x, h) - ref));
            e3.push_back(norm(rk3_step(field, x, h) - ref));
            rs.push_back(fehlberg_step(field, x, SolverConfig{}, h).r);
        }
        const double s2 = testing::loglog_slope(hs, e2);
        const double s3 = testing::loglog_slope(hs, e3);
        const double sr = testing::loglog_slope(hs, rs);
        lo2 = std::min(lo2, s2), hi2 = std::max(hi2, s2);
        lo3 = std::min(lo3, s3), hi3 = std::max(hi3, s3);
        lor = std::min(lor, sr), hir = std::max(hir, sr);
    }
    v.require(lo2 >= 2.7 && hi2 <= 3.3, "RK2 slope in [2.7, 3.3]");
    v.require(lo3 >= 3.7 && hi3 <= 4.3, "RK3 slope in [3.7, 4.3]");
    v.require(lor >= 1.8 && hir <= 2.2, "r slope in [1.8, 2.2]");
    v.detail << "5 attractor points: RK2 slope [" << fmt(lo2) << ", " << fmt(hi2) << "], RK3 [" << fmt(lo3) << ", "
             << fmt(hi3) << "], r [" << fmt(lor) << ", " << fmt(hir) << "]";
    return v;
}

// 3 -------------------------------------------------------------------------
Verdict linear_exactness()
{
    Verdict v;
    testing::Gen gen(3);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        testing::Mat3 a{};
        double fro = 0;
        for (auto& row : a)
            for (double& x : row) {
                x = gen.uniform(-2, 2);
                fro += x * x;
            }
        const double h = gen.uniform(0.05, 0.5) / std::sqrt(fro);
        const StatePoint x = gen.point(-10, 10);
        const StatePoint ax = testing::apply(a, x);
        const StatePoint a2x = testing::apply(a, ax);
        const StatePoint a3x = testing::apply(a, a2x);
        const StatePoint series = x + h * ax + (h * h / 2) * a2x + (h * h * h / 6) * a3x;
        const double rel = norm(rk3_step(testing::Linear{a}, x, h) - series) / norm(series);
        worst = std::max(worst, rel);
    }
    v.require(worst <= 1e-13, "relative error <= 1e-13");
    v.detail << "100 random systems, worst relative error " << fmt(worst, 3);
    return v;
}

// 4 -------------------------------------------------------------------------
Verdict gradient_correctness()
{
    Verdict v;
    testing::Gen gen(4);
    MlpParams p = mlp_init(kDefaultDims, 4);
    for (std::size_t l = 0; l < p.layer_count(); ++l)
        for (double& b : p.bias(l))
            b = gen.uniform(-0.1, 0.1);
    const std::span<const StatePoint> pts(dataset().points);
    const auto in = pts.subspan(1000, 16);
    const auto out = pts.subspan(1001, 16);
    for (int n : {1, 2, 5, 10}) {
        const std::vector<int> plan(in.size(), n);
        const testing::GradCheck gc = testing::check_gradient(p, in, out, plan, 100, gen);
        v.require(gc.worst_relative <= 1e-5, "n=" + std::to_string(n));
        v.detail << "n=" << n << ": " << gc.coordinates << " coords, worst " << fmt(gc.worst_relative, 3)
                 << " (kinks redrawn " << gc.kinks << ")  ";
    }
    return v;
}

double fraction_multi_step(const Rollout& r)
{
    const auto multi = std::count_if(r.n_steps.begin(), r.n_steps.end(), [](int n) { return n > 1; });
    return static_cast<double>(multi) / static_cast<double>(r.n_steps.size());
}

// 5 -------------------------------------------------------------------------
Verdict blackbox_degeneracy(const Run& run)
{
    Verdict v;
    const auto& log = run.result.log;
    double lowest = 1.0;
    for (const EpochRecord& r : log)
        lowest = std::min(lowest, r.accepted_fraction);
    const double multi = fraction_multi_step(run.rollout);
    v.require(log.front().accepted_fraction >= 0.95, "epoch-0 accepted >= 0.95");
    v.require(lowest >= 0.9, "accepted >= 0.9 in every epoch");
    v.require(multi < 0.1, "n_steps > 1 on < 10% of rollout points");
    v.detail << "epoch-0 accepted " << fmt(log.front().accepted_fraction) << ", lowest over " << log.size()
             << " epochs " << fmt(lowest) << ", rollout points with n_steps > 1: " << fmt(100 * multi, 3) << "% of "
             << run.rollout.n_steps.size() << " (" << fmt(run.seconds, 3) << " s)";
    return v;
}

// 6 -------------------------------------------------------------------------
Verdict fehlberg_trend(const Run& run)
{
    Verdict v;
    const auto& log = run.result.log;
    const EpochRecord& first = log.front();
    const EpochRecord& last = log.back();
    const double mean0 = first.new_steps ? first.new_steps->mean : NAN;
    const double mean_final = last.new_steps ? last.new_steps->mean : NAN;
    v.require(first.accepted_fraction <= 0.05, "epoch-0 accepted <= 0.05");
    v.require(mean0 >= 4 && mean0 <= 12, "epoch-0 mean new steps in [4, 12]");
    v.require(last.accepted_fraction - first.accepted_fraction >= 0.5, "final accepted exceeds epoch 0 by >= 0.5");
    v.require(last.accepted_fraction >= 0.9, "final accepted >= 0.9");
    v.require(mean_final >= 1.5 && mean_final <= 3, "final mean new steps in [1.5, 3]");
    v.detail << "epoch 0: accepted " << fmt(first.accepted_fraction) << ", mean new steps " << fmt(mean0)
             << "; epoch " << last.epoch << ": accepted " << fmt(last.accepted_fraction) << ", mean new steps "
             << fmt(mean_final) << " (min " << fmt(last.new_steps ? last.new_steps->min : NAN) << ", max "
             << fmt(last.new_steps ? last.new_steps->max : NAN) << ") (" << fmt(run.seconds, 3) << " s)";
    return v;
}

int mode_of(const std::map<int, std::size_t>& counts)
{
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [k, c] : counts)
        if (c > best_count)
            best = k, best_count = c;
    return best;
}

std::vector<double> rollout_oracle(const Run& run)
{
    const Trajectory& ref = dataset();
    return oracle_mse_series(run.rollout.trajectory.points, ref.meta.params, ref.dt_phys, ref.meta.tol);
}

double peak_abs(const Run& run)
{
    double peak = 0;
    for (const StatePoint& x : run.rollout.trajectory.points)
        for (std::size_t i = 0; i < kStateDim; ++i)
            peak = std::max(peak, std::abs(x[i]));
    return peak;
}

// 7 -------------------------------------------------------------------------
Verdict eps_sweep(const Run& coarse, const Run& fine)
{
    Verdict v;
    const auto& log = fine.result.log;
    const std::size_t settled_from = log.size() / 2;
    double lo = 1, hi = 0;
    // Rejected examples are re-integrated with their batch's pooled count.
    std::map<int, std::size_t> applied;
    std::map<int, std::size_t> per_example;
    for (std::size_t e = settled_from; e < log.size(); ++e) {
        const EpochRecord& r = log[e];
        lo = std::min(lo, r.accepted_fraction);
        hi = std::max(hi, r.accepted_fraction);
        std::size_t rejected = 0;
        for (std::size_t n = 0; n < r.rounded_step_counts.size(); ++n) {
            rejected += r.rounded_step_counts[n];
            if (r.rounded_step_counts[n] > 0)
                per_example[static_cast<int>(n)] += r.rounded_step_counts[n];
        }
        if (rejected > 0 && !r.pooled_steps.empty())
            applied[r.pooled_steps.front()] += rejected;
    }
    const int modal = mode_of(applied);
    const std::vector<double> oracle_fine = rollout_oracle(fine);
    const double med_fine = median(oracle_fine);
    const double med_coarse = median(rollout_oracle(coarse));
    const auto off_attractor = std::count(oracle_fine.begin(), oracle_fine.end(), INFINITY);
    v.require(lo >= 0.8 && hi <= 0.95, "settled accepted in [0.8, 0.95]");
    v.require(modal == 4, "modal rejected step count is 4");
    v.require(med_fine < med_coarse, "median oracle_mse below the eps=0.1 run");
    v.detail << "eps=0.01 epochs " << settled_from << ".." << log.size() - 1 << ": accepted in [" << fmt(lo) << ", "
             << fmt(hi) << "], modal applied step count " << modal << " {";
    for (const auto& [k, c] : applied)
        v.detail << k << ":" << c << " ";
    v.detail << "}, per-example rounded mode " << mode_of(per_example) << "; median oracle_mse " << fmt(med_fine)
             << " vs " << fmt(med_coarse) << " at eps=0.1, peak |x| " << fmt(peak_abs(fine), 3) << " vs "
             << fmt(peak_abs(coarse), 3);
    if (off_attractor > 0)
        v.detail << ", oracle step not computable at " << off_attractor << " points";
    v.detail << " (" << fmt(fine.seconds, 3) << " s)";
    return v;
}

// 8 -------------------------------------------------------------------------
Verdict dataset_fidelity()
{
    Verdict v;
    const Trajectory& t = dataset();
    const LorenzParams p;
    const auto field = [&](const StatePoint& x) { return lorenz_field(p, x); };
    StatePoint x = t.x0;
    double worst = 0;
    for (std::size_t i = 1; i < 100; ++i) {
        x = testing::rk4(field, x, t.dt_phys, 1e-6);
        worst = std::max(worst, testing::max_abs_diff(x, t.points[i]));
    }
    std::size_t outside = 0;
    for (std::size_t i = 100; i < t.size(); ++i) {
        const StatePoint& y = t.points[i];
        if (std::abs(y.x1) > 30 || std::abs(y.x2) > 40 || y.x3 < -5 || y.x3 > 60)
            ++outside;
    }
    v.require(t.size() == 5000, "5000 points");
    v.require(worst <= 1e-6, "first 100 points within 1e-6 of the RK4 reference");
    v.require(outside == 0, "inside the bounding box after point 100");
    v.detail << "max deviation over the first 100 points " << fmt(worst, 3) << ", points outside the box " << outside;
    return v;
}

// 9 -------------------------------------------------------------------------
using Snapshot = std::map<std::string, std::string>;

Snapshot snapshot(const testing::fs::path& dir)
{
    Snapshot s;
    for (const auto& entry : testing::fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            s[entry.path().string()] = testing::slurp(entry.path());
    return s;
}

Verdict determinism()
{
    Verdict v;
    testing::ScratchDir dir("adaptode_acceptance_cli");
    const std::string d = dir / "data.csv";
    const std::vector<std::string> commands{
        "gen-data --n 400 --out " + d,
        "train --data " + d + " --mode blackbox --epochs 2 --seed 7 --quiet --out " + (dir / "bb.json"),
        "train --data " + d + " --mode fehlberg --epochs 2 --seed 7 --quiet --out " + (dir / "fb.json"),
        "generate --model " + (dir / "fb.json") + " --data " + d + " --out " + (dir / "gen.csv"),
        "eval --data " + d + " --generated " + (dir / "gen.csv") + " --steps " + (dir / "gen.csv.steps.csv") +
            " --out " + (dir / "report.csv"),
        "eval --data " + d + " --model " + (dir / "bb.json") + " --out " + (dir / "report_bb.csv"),
        "sweep --data " + d + " --epochs 1 --quiet --out-dir " + (dir / "sweep"),
        "replay " + (dir / "fb.json.manifest.json"),
    };
    const auto run_all = [&] {
        for (const std::string& c : commands)
            if (testing::run_cli(c) != 0)
                return false;
        return true;
    };
    const bool first_ok = run_all();
    const Snapshot first = snapshot(dir.path);
    for (const auto& [path, bytes] : first)
        testing::fs::remove(path);
    const bool second_ok = run_all();
    const Snapshot second = snapshot(dir.path);
    v.require(first_ok && second_ok, "every command succeeds");
    std::size_t differing = 0;
    for (const auto& [path, bytes] : first) {
        const auto it = second.find(path);
        if (it == second.end() || it->second != bytes)
            ++differing;
    }
    v.require(first.size() == second.size() && differing == 0, "byte-identical outputs");
    v.detail << commands.size() << " commands run twice, " << first.size() << " output files, " << differing
             << " differ";
    return v;
}

// 10 ------------------------------------------------------------------------
Verdict lbfgs_conformance(const std::vector<const Run*>& runs)
{
    Verdict v;
    const LbfgsConfig cfg;
    std::size_t steps = 0, violations = 0;
    for (const Run* run : runs)
        for (const EpochRecord& r : run->result.log)
            for (const LineSearchRecord& s : r.optimizer.steps) {
                ++steps;
                const bool armijo = s.f <= s.f0 + cfg.c1 * s.step * s.dg0;
                const bool curvature = std::abs(s.dg) <= cfg.c2 * std::abs(s.dg0);
                if (!(armijo && curvature && s.dg0 < 0))
                    ++violations;
            }
    v.require(steps > 0 && violations == 0, "strong Wolfe on every accepted step");

    std::vector<double> a(10);
    testing::Gen gen(10);
    for (double& x : a)
        x = gen.uniform(-10, 10);
    const Objective quad = [&](std::span<const double> x, std::span<double> g) {
        double f = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            f += (x[i] - a[i]) * (x[i] - a[i]);
            g[i] = 2 * (x[i] - a[i]);
        }
        return f;
    };
    LbfgsConfig qcfg;
    qcfg.max_iter = 15;
    qcfg.max_eval = 1000;
    qcfg.tol_grad = 1e-14;
    qcfg.tol_change = 1e-30;
    Lbfgs opt(qcfg);
    std::vector<double> x(10, 0.0);
    const LbfgsTrace trace = opt.minimize(quad, x);
    double dist = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        dist += (x[i] - a[i]) * (x[i] - a[i]);
    dist = std::sqrt(dist);
    v.require(trace.steps.size() <= 15 && dist <= 1e-8, "quadratic solved to 1e-8 within 15 iterations");
    v.detail << steps << " line-search steps checked across training runs, " << violations
             << " violations; 10-D quadratic |x - a| = " << fmt(dist, 3) << " after " << trace.steps.size()
             << " iterations";
    return v;
}

} // namespace

int main()
{
    int failed = 0;
    const auto report = [&](int id, const char* name, const Verdict& v) {
        std::printf("criterion %2d %-28s %s  %s\n", id, name, v.pass ? "PASS" : "FAIL",
                    (v.detail.str() + v.failures).c_str());
        std::fflush(stdout);
        if (!v.pass)
            ++failed;
    };

    report(1, "solver algebra", solver_algebra());
    report(2, "order properties", order_properties());
    report(3, "linear-field exactness", linear_exactness());
    report(4, "gradient correctness", gradient_correctness());
    const Run blackbox = train_and_roll(TrainMode::blackbox, 0.1, 50);
    report(5, "black-box degeneracy", blackbox_degeneracy(blackbox));
    const Run fehlberg = train_and_roll(TrainMode::fehlberg, 0.1, 100);
    report(6, "fehlberg training trend", fehlberg_trend(fehlberg));
    const Run fine = train_and_roll(TrainMode::blackbox, 0.01, 50);
    report(7, "eps sweep", eps_sweep(blackbox, fine));
    report(8, "dataset fidelity", dataset_fidelity());
    report(9, "determinism", determinism());
    report(10, "l-bfgs conformance", lbfgs_conformance({&blackbox, &fehlberg, &fine}));

    std::printf("%d of 10 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
