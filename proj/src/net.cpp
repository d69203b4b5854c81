#include "adaptode/net.hpp"

#include "adaptode/error.hpp"
#include "adaptode/integrators.hpp"
#include "adaptode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace adaptode {

MlpParams::MlpParams(std::vector<int> dims) : dims_(std::move(dims))
{
    validate_dims(dims_);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        offsets_.push_back(offset);
        offset += static_cast<std::size_t>(dims_[l + 1]) * (static_cast<std::size_t>(dims_[l]) + 1);
    }
    values_.assign(offset, 0.0);
}

std::span<double> MlpParams::weights(std::size_t layer)
{
    const auto n = static_cast<std::size_t>(fan_out(layer)) * fan_in(layer);
    return std::span<double>(values_).subspan(offsets_.at(layer), n);
}

std::span<const double> MlpParams::weights(std::size_t layer) const
{
    const auto n = static_cast<std::size_t>(fan_out(layer)) * fan_in(layer);
    return std::span<const double>(values_).subspan(offsets_.at(layer), n);
}

std::span<double> MlpParams::bias(std::size_t layer)
{
    const auto n = static_cast<std::size_t>(fan_out(layer)) * fan_in(layer);
    return std::span<double>(values_).subspan(offsets_.at(layer) + n, fan_out(layer));
}

std::span<const double> MlpParams::bias(std::size_t layer) const
{
    const auto n = static_cast<std::size_t>(fan_out(layer)) * fan_in(layer);
    return std::span<const double>(values_).subspan(offsets_.at(layer) + n, fan_out(layer));
}

bool MlpParams::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void validate_dims(const std::vector<int>& dims)
{
    if (dims.size() < 2)
        throw InvalidArgument("a network needs at least an input and an output layer");
    if (dims.front() != static_cast<int>(kStateDim) || dims.back() != static_cast<int>(kStateDim))
        throw InvalidArgument("network input and output widths must both be 3");
    for (int d : dims)
        if (d < 1)
            throw InvalidArgument("layer widths must be positive");
}

MlpParams mlp_init(const std::vector<int>& dims, std::uint64_t seed)
{
    MlpParams p(dims);
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
        const std::uint64_t key = rng::stream_key(seed, l);
        const double bound = 1.0 / std::sqrt(static_cast<double>(p.fan_in(l)));
        auto w = p.weights(l);
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = rng::symmetric(rng::at(key, i), bound);
    }
    return p;
}

namespace {

// Examples are stored column-wise: row c of a (rows x count) block holds
// component c of every example, so the kernels below vectorize across
// examples and each example sees the same sequence of roundings whatever the
// batch size.
constexpr std::size_t kLanes = 8;

struct Block {
    std::size_t rows = 0;
    std::size_t count = 0;
    std::vector<double> data;

    Block() = default;
    Block(std::size_t r, std::size_t n) : rows(r), count(n), data(r * n, 0.0) {}

    double* row(std::size_t r) noexcept { return data.data() + r * count; }
    const double* row(std::size_t r) const noexcept { return data.data() + r * count; }
};

Block to_block(std::span<const StatePoint> xs)
{
    Block b(kStateDim, xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t c = 0; c < kStateDim; ++c)
            b.row(c)[i] = xs[i][c];
    return b;
}

StatePoint column(const Block& b, std::size_t i) { return {b.row(0)[i], b.row(1)[i], b.row(2)[i]}; }

// out = W in + bias, optionally followed by ReLU.
void affine_forward(const double* w, const double* bias, std::size_t nout, std::size_t nin, const Block& in,
                    Block& out, bool relu)
{
    const std::size_t n = in.count;
    for (std::size_t j = 0; j < nout; ++j) {
        const double* wj = w + j * nin;
        double* dst = out.row(j);
        std::size_t b0 = 0;
        for (; b0 + kLanes <= n; b0 += kLanes) {
            double acc[kLanes];
            for (std::size_t t = 0; t < kLanes; ++t)
                acc[t] = bias[j];
            for (std::size_t k = 0; k < nin; ++k) {
                const double wk = wj[k];
                const double* src = in.row(k) + b0;
                for (std::size_t t = 0; t < kLanes; ++t)
                    acc[t] += wk * src[t];
            }
            for (std::size_t t = 0; t < kLanes; ++t)
                dst[b0 + t] = relu ? (acc[t] > 0.0 ? acc[t] : 0.0) : acc[t];
        }
        for (; b0 < n; ++b0) {
            double acc = bias[j];
            for (std::size_t k = 0; k < nin; ++k)
                acc += wj[k] * in.row(k)[b0];
            dst[b0] = relu ? (acc > 0.0 ? acc : 0.0) : acc;
        }
    }
}

// grad_w += dout in^T, grad_b += row sums of dout, and, when din is non-null,
// din = W^T dout.
void affine_backward(const double* w, std::size_t nout, std::size_t nin, const Block& in, const Block& dout,
                     double* grad_w, double* grad_b, Block* din)
{
    const std::size_t n = in.count;
    for (std::size_t j = 0; j < nout; ++j) {
        const double* dj = dout.row(j);
        for (std::size_t k = 0; k < nin; ++k) {
            const double* xk = in.row(k);
            double acc[kLanes] = {};
            std::size_t b0 = 0;
            for (; b0 + kLanes <= n; b0 += kLanes)
                for (std::size_t t = 0; t < kLanes; ++t)
                    acc[t] += dj[b0 + t] * xk[b0 + t];
            double s = 0.0;
            for (; b0 < n; ++b0)
                s += dj[b0] * xk[b0];
            for (std::size_t t = 0; t < kLanes; ++t)
                s += acc[t];
            grad_w[j * nin + k] += s;
        }
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b)
            s += dj[b];
        grad_b[j] += s;
    }
    if (din == nullptr)
        return;
    for (std::size_t k = 0; k < nin; ++k) {
        double* dst = din->row(k);
        std::size_t b0 = 0;
        for (; b0 + kLanes <= n; b0 += kLanes) {
            double acc[kLanes] = {};
            for (std::size_t j = 0; j < nout; ++j) {
                const double wjk = w[j * nin + k];
                const double* src = dout.row(j) + b0;
                for (std::size_t t = 0; t < kLanes; ++t)
                    acc[t] += wjk * src[t];
            }
            for (std::size_t t = 0; t < kLanes; ++t)
                dst[b0 + t] = acc[t];
        }
        for (; b0 < n; ++b0) {
            double acc = 0.0;
            for (std::size_t j = 0; j < nout; ++j)
                acc += w[j * nin + k] * dout.row(j)[b0];
            dst[b0] = acc;
        }
    }
}

// Activations of one network evaluation: acts[0] is the input, acts[l] the
// post-ReLU output of layer l-1.
struct Tape {
    std::vector<Block> acts;
};

void forward(const MlpParams& p, const Block& in, Block& out, Tape* tape)
{
    const std::size_t layers = p.layer_count();
    Block cur = in;
    for (std::size_t l = 0; l < layers; ++l) {
        const bool last = l + 1 == layers;
        Block next(static_cast<std::size_t>(p.fan_out(l)), in.count);
        affine_forward(p.weights(l).data(), p.bias(l).data(), p.fan_out(l), p.fan_in(l), cur, next, !last);
        if (tape)
            tape->acts.push_back(std::move(cur));
        cur = std::move(next);
    }
    out = std::move(cur);
}

// Accumulates the parameter gradient of <dout, f(in)> into grad and returns
// the input cotangent.
Block backward(const MlpParams& p, const Tape& tape, Block dout, Gradient& grad)
{
    const std::size_t layers = p.layer_count();
    for (std::size_t l = layers; l-- > 0;) {
        const Block& in = tape.acts[l];
        Block din(in.rows, in.count);
        affine_backward(p.weights(l).data(), p.fan_out(l), p.fan_in(l), in, dout, grad.weights(l).data(),
                        grad.bias(l).data(), &din);
        if (l > 0) {
            // ReLU: the recorded activation is positive exactly where the unit was active.
            for (std::size_t i = 0; i < din.data.size(); ++i)
                if (!(in.data[i] > 0.0))
                    din.data[i] = 0.0;
        }
        dout = std::move(din);
    }
    return dout;
}

void require_finite_params(const MlpParams& p)
{
    if (!p.all_finite())
        throw NumericError("network parameters contain non-finite values");
}

struct SubstepTape {
    Tape f1, f2, f3;
};

// Forward pass of n uniform RK3 substeps for a group of examples, optionally
// recording every network evaluation.
Block integrate_group(const MlpParams& p, Block x, int n, std::vector<SubstepTape>* tapes)
{
    const double h = 1.0 / n;
    const std::size_t count = x.count;
    Block f1, f2, f3;
    Block y(kStateDim, count);
    for (int s = 0; s < n; ++s) {
        SubstepTape* tp = nullptr;
        if (tapes) {
            tapes->emplace_back();
            tp = &tapes->back();
        }
        forward(p, x, f1, tp ? &tp->f1 : nullptr);
        for (std::size_t c = 0; c < kStateDim; ++c)
            for (std::size_t i = 0; i < count; ++i)
                y.row(c)[i] = rk::heun_stage(x.row(c)[i], h, f1.row(c)[i]);
        forward(p, y, f2, tp ? &tp->f2 : nullptr);
        for (std::size_t c = 0; c < kStateDim; ++c)
            for (std::size_t i = 0; i < count; ++i)
                y.row(c)[i] = rk::rk3_stage(x.row(c)[i], h, f1.row(c)[i], f2.row(c)[i]);
        forward(p, y, f3, tp ? &tp->f3 : nullptr);
        for (std::size_t c = 0; c < kStateDim; ++c)
            for (std::size_t i = 0; i < count; ++i)
                x.row(c)[i] = rk::rk3_combine(x.row(c)[i], h, f1.row(c)[i], f2.row(c)[i], f3.row(c)[i]);
    }
    return x;
}

// Reverse sweep through the substeps recorded by integrate_group.
void backprop_group(const MlpParams& p, const std::vector<SubstepTape>& tapes, int n, Block dx, Gradient& grad)
{
    const double h = 1.0 / n;
    const double w12 = h / 6.0;
    const double w3 = (h / 6.0) * 4.0;
    const std::size_t count = dx.count;
    Block df1(kStateDim, count), df2(kStateDim, count), df3(kStateDim, count);
    for (std::size_t s = tapes.size(); s-- > 0;) {
        const SubstepTape& tp = tapes[s];
        for (std::size_t i = 0; i < dx.data.size(); ++i) {
            df1.data[i] = w12 * dx.data[i];
            df2.data[i] = w12 * dx.data[i];
            df3.data[i] = w3 * dx.data[i];
        }
        // f3 = F(x + h/4 (f1 + f2))
        const Block dy3 = backward(p, tp.f3, df3, grad);
        for (std::size_t i = 0; i < dx.data.size(); ++i) {
            dx.data[i] += dy3.data[i];
            df1.data[i] += (h / 4.0) * dy3.data[i];
            df2.data[i] += (h / 4.0) * dy3.data[i];
        }
        // f2 = F(x + h f1)
        const Block dy2 = backward(p, tp.f2, df2, grad);
        for (std::size_t i = 0; i < dx.data.size(); ++i) {
            dx.data[i] += dy2.data[i];
            df1.data[i] += h * dy2.data[i];
        }
        // f1 = F(x)
        const Block dy1 = backward(p, tp.f1, df1, grad);
        for (std::size_t i = 0; i < dx.data.size(); ++i)
            dx.data[i] += dy1.data[i];
    }
}

// Example indices grouped by substep count, in increasing count order.
std::map<int, std::vector<std::size_t>> group_by_substeps(std::span<const int> substeps)
{
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < substeps.size(); ++i) {
        if (substeps[i] < 1)
            throw InvalidArgument("example " + std::to_string(i) + " has a substep count below 1");
        groups[substeps[i]].push_back(i);
    }
    return groups;
}

Block gather(std::span<const StatePoint> xs, const std::vector<std::size_t>& idx)
{
    Block b(kStateDim, idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t c = 0; c < kStateDim; ++c)
            b.row(c)[i] = xs[idx[i]][c];
    return b;
}

} // namespace

StatePoint mlp_forward(const MlpParams& p, const StatePoint& x)
{
    require_finite_params(p);
    Block out;
    forward(p, to_block(std::span<const StatePoint>(&x, 1)), out, nullptr);
    const StatePoint y = column(out, 0);
    if (!is_finite(y))
        throw NumericError("network output is not finite");
    return y;
}

std::vector<StatePoint> mlp_forward_batch(const MlpParams& p, std::span<const StatePoint> xs)
{
    require_finite_params(p);
    Block out;
    forward(p, to_block(xs), out, nullptr);
    std::vector<StatePoint> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = column(out, i);
    return ys;
}

BatchStages evaluate_stages_batch(const MlpParams& p, std::span<const StatePoint> xs, double h)
{
    require_finite_params(p);
    const std::size_t n = xs.size();
    const Block x = to_block(xs);
    Block f1, f2, f3;
    Block y(kStateDim, n);
    forward(p, x, f1, nullptr);
    for (std::size_t c = 0; c < kStateDim; ++c)
        for (std::size_t i = 0; i < n; ++i)
            y.row(c)[i] = rk::heun_stage(x.row(c)[i], h, f1.row(c)[i]);
    forward(p, y, f2, nullptr);
    for (std::size_t c = 0; c < kStateDim; ++c)
        for (std::size_t i = 0; i < n; ++i)
            y.row(c)[i] = rk::rk3_stage(x.row(c)[i], h, f1.row(c)[i], f2.row(c)[i]);
    forward(p, y, f3, nullptr);

    BatchStages out;
    out.f1.resize(n);
    out.f2.resize(n);
    out.f3.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.f1[i] = column(f1, i);
        out.f2[i] = column(f2, i);
        out.f3[i] = column(f3, i);
        if (!is_finite(out.f1[i]) || !is_finite(out.f2[i]) || !is_finite(out.f3[i]))
            throw NumericError("non-finite stage evaluation for example " + std::to_string(i));
    }
    return out;
}

std::vector<StatePoint> solve_planned(const MlpParams& p, std::span<const StatePoint> inputs,
                                      std::span<const int> substeps)
{
    if (inputs.size() != substeps.size())
        throw InvalidArgument("solve_planned: inputs and substeps differ in length");
    require_finite_params(p);
    std::vector<StatePoint> out(inputs.size());
    for (const auto& [n, idx] : group_by_substeps(substeps)) {
        const Block x = integrate_group(p, gather(inputs, idx), n, nullptr);
        for (std::size_t i = 0; i < idx.size(); ++i)
            out[idx[i]] = column(x, i);
    }
    return out;
}

LossAndGrad loss_and_grad(const MlpParams& p, std::span<const StatePoint> inputs,
                          std::span<const StatePoint> targets, std::span<const int> substeps)
{
    if (inputs.empty())
        throw InvalidArgument("loss_and_grad: empty batch");
    if (inputs.size() != targets.size() || inputs.size() != substeps.size())
        throw InvalidArgument("loss_and_grad: inputs, targets and substeps differ in length");
    require_finite_params(p);

    LossAndGrad result{0.0, Gradient(p.dims())};
    for (const auto& [n, idx] : group_by_substeps(substeps)) {
        std::vector<SubstepTape> tapes;
        tapes.reserve(static_cast<std::size_t>(n));
        const Block x = integrate_group(p, gather(inputs, idx), n, &tapes);

        Block dx(kStateDim, idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const StatePoint pred = column(x, i);
            if (!is_finite(pred))
                throw NumericError("non-finite prediction for example " + std::to_string(idx[i]));
            const StatePoint diff = pred - targets[idx[i]];
            result.loss += squared_norm(diff);
            for (std::size_t c = 0; c < kStateDim; ++c)
                dx.row(c)[i] = 2.0 * diff[c];
        }
        backprop_group(p, tapes, n, std::move(dx), result.grad);
    }
    if (!std::isfinite(result.loss))
        throw NumericError("loss is not finite");
    if (!result.grad.all_finite())
        throw NumericError("gradient is not finite");
    return result;
}

} // namespace adaptode
