#pragma once

#include "adaptode/state.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adaptode {

/// Parameters of a fully connected ReLU network. Layer l maps dims[l] inputs
/// to dims[l+1] outputs with a row-major (out x in) weight matrix and a bias;
/// every layer but the last is followed by a ReLU. All values live in one flat
/// buffer, weights of a layer first, then its bias.
class MlpParams {
public:
    MlpParams() = default;
    /// All-zero parameters for the given layer sizes.
    explicit MlpParams(std::vector<int> dims);

    const std::vector<int>& dims() const noexcept { return dims_; }
    std::size_t layer_count() const noexcept { return dims_.empty() ? 0 : dims_.size() - 1; }
    int fan_in(std::size_t layer) const { return dims_.at(layer); }
    int fan_out(std::size_t layer) const { return dims_.at(layer + 1); }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    bool same_shape(const MlpParams& other) const noexcept { return dims_ == other.dims_; }
    bool all_finite() const noexcept;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;

private:
    std::vector<int> dims_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// dL/dtheta, laid out exactly like the parameters it differentiates.
using Gradient = MlpParams;

inline const std::vector<int> kDefaultDims{3, 50, 50, 3};

/// Throws InvalidArgument unless dims describe a 3 -> ... -> 3 network with
/// positive layer widths.
void validate_dims(const std::vector<int>& dims);

/// Weights uniform on (-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases. Layer l
/// draws from counter-based SplitMix64 stream l of `seed`, one counter per
/// row-major weight index.
MlpParams mlp_init(const std::vector<int>& dims, std::uint64_t seed);

/// f_theta(x). Throws NumericError on non-finite parameters or output.
StatePoint mlp_forward(const MlpParams& p, const StatePoint& x);

/// Adapter exposing the network as a VectorField.
struct MlpField {
    const MlpParams* params;
    StatePoint operator()(const StatePoint& x) const { return mlp_forward(*params, x); }
};

/// f_theta over many points at once; element-wise identical to mlp_forward.
std::vector<StatePoint> mlp_forward_batch(const MlpParams& p, std::span<const StatePoint> xs);

/// Batched f1, f2, f3 of the Fehlberg 3(2) pair at step h.
struct BatchStages {
    std::vector<StatePoint> f1;
    std::vector<StatePoint> f2;
    std::vector<StatePoint> f3;
};

/// Element-wise identical to the stages computed by fehlberg_step on MlpField.
/// Throws NumericError naming the first example whose stages are not finite.
BatchStages evaluate_stages_batch(const MlpParams& p, std::span<const StatePoint> xs, double h);

struct LossAndGrad {
    double loss = 0.0;
    Gradient grad;
};

/// Sum over examples of |target_i - ODE_Solve(f_theta, input_i)|^2 and its
/// exact gradient. Example i is solved with substeps[i] uniform RK3 steps of
/// size 1/substeps[i]; 1 means the single step with h = 1. The gradient is
/// obtained by reverse accumulation through every recorded stage evaluation.
/// Throws NumericError naming the first example whose prediction is not finite.
LossAndGrad loss_and_grad(const MlpParams& p, std::span<const StatePoint> inputs,
                          std::span<const StatePoint> targets, std::span<const int> substeps);

/// The predictions loss_and_grad compares against the targets.
std::vector<StatePoint> solve_planned(const MlpParams& p, std::span<const StatePoint> inputs,
                                      std::span<const int> substeps);

} // namespace adaptode
