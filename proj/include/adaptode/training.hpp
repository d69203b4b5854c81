#pragma once

#include "adaptode/integrators.hpp"
#include "adaptode/lorenz.hpp"
#include "adaptode/net.hpp"
#include "adaptode/optim.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adaptode {

enum class TrainMode {
    blackbox, ///< error rate from the RK2/RK3 pair, solver used as is
    fehlberg, ///< error rate from the distance between the RK3 hypothesis and the target
};

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& s);

struct TrainConfig {
    TrainMode mode = TrainMode::blackbox;
    int epochs = 50;
    SolverConfig solver{};
    LbfgsConfig optimizer{};
    std::uint64_t seed = 0;
    std::size_t mini_batch = 0; ///< 0 trains on the full batch
    std::vector<int> dims = kDefaultDims;

    void validate() const;
};

/// Training pairs: the network predicts targets[i] from inputs[i].
struct ExampleBatch {
    std::span<const StatePoint> inputs;
    std::span<const StatePoint> targets;

    std::size_t size() const noexcept { return inputs.size(); }
};

/// Examples (points[i-1] -> points[i]) for i in [begin + 1, end).
ExampleBatch examples_of(const Trajectory& t, std::size_t begin = 0, std::size_t end = SIZE_MAX);

struct ExamplePlan {
    bool accepted = true;
    double r = 0.0;      ///< error rate the decision was taken on
    double h_new = 0.0;  ///< raw proposed step before pooling, 0 when accepted
    StatePoint a1;       ///< RK2 hypothesis
    StatePoint a2;       ///< one-step RK3 hypothesis
};

/// Per-example accept/reject decisions for one batch. Rejected examples are all
/// re-integrated with n_pool substeps, derived from the smallest proposed
/// step of the batch clipped from below at h_clip.
struct BatchPlan {
    std::vector<ExamplePlan> examples;
    int n_pool = 0;          ///< 0 when nothing was rejected
    double pooled_h = 0.0;   ///< max(min rejected h', h_clip), 0 when nothing was rejected

    std::size_t accepted_count() const noexcept;
    double accepted_fraction() const noexcept;
    /// 1 for accepted examples, n_pool for rejected ones.
    std::vector<int> substeps() const;
};

BatchPlan plan_batch_blackbox(const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg);
BatchPlan plan_batch_fehlberg(const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg);
BatchPlan plan_batch(TrainMode mode, const MlpParams& p, const ExampleBatch& batch, const SolverConfig& cfg);

/// Summary of the new step counts 1/h' (before rounding) of rejected examples.
struct NewStepStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;               ///< objective after the epoch's optimizer call
    double accepted_fraction = 0.0;  ///< from the plan built at the start of the epoch
    std::optional<NewStepStats> new_steps;
    /// Rejected examples per rounded step count ceil(1 / max(h', h_clip)).
    std::vector<std::size_t> rounded_step_counts;
    /// n_pool of every batch of the epoch, in batch order (0 when all accepted).
    std::vector<int> pooled_steps;
    LbfgsTrace optimizer;
};

/// Statistics of an epoch recomputed from the plans it trained on.
EpochRecord summarize_plans(std::span<const BatchPlan> plans, const SolverConfig& cfg);

struct TrainResult {
    MlpParams model;
    std::vector<EpochRecord> log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Each epoch builds the plan from the current parameters, freezes it, and
/// runs one L-BFGS call on the loss over the planned solver paths. With a
/// mini-batch size, the dataset is cut into consecutive chunks that are
/// planned and optimized in turn.
TrainResult train(const Trajectory& dataset, const TrainConfig& cfg, const MlpParams* init = nullptr,
                  const EpochCallback& on_epoch = {});

} // namespace adaptode
