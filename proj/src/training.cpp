#include "adaptode/training.hpp"

#include "adaptode/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptode {

std::string to_string(TrainMode mode)
{
    return mode == TrainMode::blackbox ? "blackbox" : "fehlberg";
}

TrainMode parse_train_mode(const std::string& s)
{
    if (s == "blackbox")
        return TrainMode::blackbox;
    if (s == "fehlberg")
        return TrainMode::fehlberg;
    throw InvalidArgument("unknown training mode '" + s + "' (expected blackbox or fehlberg)");
}

void TrainConfig::validate() const
{
    if (epochs < 1)
        throw InvalidArgument("epochs must be at least 1");
    solver.validate();
    optimizer.validate();
    validate_dims(dims);
}

ExampleBatch examples_of(const Trajectory& t, std::size_t begin, std::size_t end)
{
    end = std::min(end, t.points.size());
    if (end < begin + 2)
        throw InvalidArgument("a batch needs at least two consecutive points");
    const std::span<const StatePoint> pts(t.points);
    return {pts.subspan(begin, end - begin - 1), pts.subspan(begin + 1, end - begin - 1)};
}

std::size_t BatchPlan::accepted_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(examples.begin(), examples.end(), [](const ExamplePlan& e) { return e.accepted; }));
}

double BatchPlan::accepted_fraction() const noexcept
{
    if (examples.empty())
        return 1.0;
    return static_cast<double>(accepted_count()) / static_cast<double>(examples.size());
}

std::vector<int> BatchPlan::substeps() const
{
    std::vector<int> out(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i)
        out[i] = examples[i].accepted ? 1 : n_pool;
    return out;
}

namespace {

BatchPlan plan_impl(TrainMode mode, const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg)
{
    cfg.validate();
    if (batch.size() == 0)
        throw InvalidArgument("cannot plan an empty batch");
    if (batch.inputs.size() != batch.targets.size())
        throw InvalidArgument("batch inputs and targets differ in length");

    const double h = cfg.h0;
    const BatchStages st = evaluate_stages_batch(p, batch.inputs, h);

    BatchPlan plan;
    plan.examples.resize(batch.size());
    double min_h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        ExamplePlan& e = plan.examples[i];
        const StatePoint& x = batch.inputs[i];
        e.a1 = rk::rk2_combine(x, h, st.f1[i], st.f2[i]);
        e.a2 = rk::rk3_combine(x, h, st.f1[i], st.f2[i], st.f3[i]);
        e.r = mode == TrainMode::blackbox ? norm(e.a1 - e.a2) / h : norm(batch.targets[i] - e.a2) / h;
        const StepDecision d = decide_step(e.r, h, cfg);
        e.accepted = d.accepted;
        if (!d.accepted) {
            e.h_new = *d.h_new;
            min_h = std::min(min_h, e.h_new);
        }
    }
    if (std::isfinite(min_h)) {
        plan.pooled_h = std::max(min_h, cfg.h_clip);
        plan.n_pool = static_cast<int>(std::ceil(1.0 / plan.pooled_h));
    }
    return plan;
}

} // namespace

BatchPlan plan_batch_blackbox(const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg)
{
    return plan_impl(TrainMode::blackbox, p, batch, cfg);
}

BatchPlan plan_batch_fehlberg(const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg)
{
    return plan_impl(TrainMode::fehlberg, p, batch, cfg);
}

BatchPlan plan_batch(TrainMode mode, const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg)
{
    return plan_impl(mode, p, batch, cfg);
}

EpochRecord summarize_plans(std::span<const BatchPlan> plans, const SolverConfig& cfg)
{
    EpochRecord rec;
    rec.rounded_step_counts.assign(static_cast<std::size_t>(cfg.max_substeps()) + 1, 0);
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    NewStepStats stats{0.0, std::numeric_limits<double>::infinity(), 0.0};
    for (const BatchPlan& plan : plans) {
        rec.pooled_steps.push_back(plan.n_pool);
        for (const ExamplePlan& e : plan.examples) {
            ++total;
            if (e.accepted) {
                ++accepted;
                continue;
            }
            ++rejected;
            const double steps = 1.0 / e.h_new;
            stats.mean += steps;
            stats.min = std::min(stats.min, steps);
            stats.max = std::max(stats.max, steps);
            const auto rounded = static_cast<std::size_t>(std::ceil(1.0 / std::max(e.h_new, cfg.h_clip)));
            ++rec.rounded_step_counts.at(rounded);
        }
    }
    rec.accepted_fraction = total == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(total);
    if (rejected > 0) {
        stats.mean /= static_cast<double>(rejected);
        rec.new_steps = stats;
    }
    return rec;
}

TrainResult train(const Trajectory& dataset, const TrainConfig& cfg, const MlpParams* init,
                  const EpochCallback& on_epoch)
{
    validate_dataset(dataset);
    cfg.validate();

    TrainResult result;
    if (init) {
        if (init->dims() != cfg.dims)
            throw InvalidArgument("initial parameters do not match the configured layer sizes");
        if (!init->all_finite())
            throw NumericError("initial parameters contain non-finite values");
        result.model = *init;
    } else {
        result.model = mlp_init(cfg.dims, cfg.seed);
    }

    const std::size_t n_examples = dataset.size() - 1;
    const std::size_t chunk = cfg.mini_batch == 0 ? n_examples : std::min(cfg.mini_batch, n_examples);

    Lbfgs optimizer(cfg.optimizer);
    MlpParams work = result.model;
    std::vector<double> theta(result.model.values().begin(), result.model.values().end());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<BatchPlan> plans;
        LbfgsTrace merged;
        double epoch_loss = 0.0;
        try {
            for (std::size_t first = 0; first < n_examples; first += chunk) {
                const std::size_t last = std::min(first + chunk, n_examples);
                const ExampleBatch batch = examples_of(dataset, first, last + 1);

                std::copy(theta.begin(), theta.end(), work.values().begin());
                plans.push_back(plan_batch(cfg.mode, work, batch, cfg.solver));
                const std::vector<int> substeps = plans.back().substeps();

                const Objective objective = [&](std::span<const double> x, std::span<double> g) {
                    std::copy(x.begin(), x.end(), work.values().begin());
                    try {
                        const LossAndGrad lg = loss_and_grad(work, batch.inputs, batch.targets, substeps);
                        std::copy(lg.grad.values().begin(), lg.grad.values().end(), g.begin());
                        return lg.loss;
                    } catch (const NumericError&) {
                        return std::numeric_limits<double>::infinity();
                    }
                };
                LbfgsTrace trace = optimizer.minimize(objective, theta);
                epoch_loss += trace.losses.back();
                merged.losses.insert(merged.losses.end(), trace.losses.begin(), trace.losses.end());
                merged.steps.insert(merged.steps.end(), trace.steps.begin(), trace.steps.end());
                merged.evaluations += trace.evaluations;
                merged.line_search_failed = merged.line_search_failed || trace.line_search_failed;
                merged.stop = trace.stop;
            }
        } catch (const NumericError& e) {
            throw NumericError("training aborted at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(epoch_loss))
            throw NumericError("training aborted at epoch " + std::to_string(epoch) + ": loss is not finite");

        EpochRecord rec = summarize_plans(plans, cfg.solver);
        rec.epoch = epoch;
        rec.loss = epoch_loss;
        rec.optimizer = std::move(merged);
        if (on_epoch)
            on_epoch(rec);
        result.log.push_back(std::move(rec));
    }
    std::copy(theta.begin(), theta.end(), result.model.values().begin());
    return result;
}

} // namespace adaptode
