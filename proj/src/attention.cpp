#include "seqmine/attention.hpp"

#include <algorithm>
#include <cmath>

#include "seqmine/ops.hpp"
#include "seqmine/random.hpp"

namespace seqmine {

AttentionScaleParams AttentionScaleParams::init(Index encoder_width, Index half_width,
                                                std::mt19937_64& rng) {
    if (encoder_width < 1) throw ValueError("attention encoder width must be positive");
    if (half_width < 0) throw ValueError("attention half width must be non-negative");
    const double bound = 1.0 / std::sqrt(static_cast<double>(encoder_width));
    AttentionScaleParams p;
    p.weight = uniform_tensor({1, encoder_width}, -bound, bound, rng);
    p.bias = uniform_tensor({1}, -bound, bound, rng);
    p.half_width = half_width;
    return p;
}

void AttentionScaleParams::validate() const {
    if (weight.rank() != 2 || weight.rows() != 1) {
        throw ShapeError("attention weight must be [1, 2h], got " + shape_str(weight.shape()));
    }
    if (!bias.is_scalar()) {
        throw ShapeError("attention bias must be scalar, got " + shape_str(bias.shape()));
    }
    if (half_width < 0) throw ValueError("attention half width must be non-negative");
}

MultiScaleParams MultiScaleParams::init(Index encoder_width,
                                        const std::vector<Index>& window_lengths,
                                        std::mt19937_64& rng) {
    if (window_lengths.empty()) throw ValueError("at least one attention scale is required");
    MultiScaleParams p;
    p.scales.reserve(window_lengths.size());
    for (Index w : window_lengths) {
        if (w < 1 || w % 2 == 0) {
            throw ValueError("window lengths must be odd and >= 1, got " + std::to_string(w));
        }
        p.scales.push_back(AttentionScaleParams::init(encoder_width, (w - 1) / 2, rng));
    }
    return p;
}

void MultiScaleParams::validate() const {
    if (scales.empty()) throw ValueError("at least one attention scale is required");
    const Index width = scales.front().encoder_width();
    for (const auto& s : scales) {
        s.validate();
        if (s.encoder_width() != width) {
            throw ShapeError("attention scales disagree on encoder width");
        }
    }
}

Tensor energies(const HiddenSequence& hidden, const AttentionScaleParams& scale) {
    scale.validate();
    if (hidden.values.cols() != scale.encoder_width()) {
        throw ShapeError("attention weight width " + std::to_string(scale.encoder_width()) +
                         " does not match hidden width " + std::to_string(hidden.values.cols()));
    }
    const Index steps = hidden.length();
    Tensor scores = reshape(matmul(hidden.values, transpose(scale.weight)), {steps});
    return tanh(add_scalar(scores, scale.bias));
}

Tensor windowed_weights(const Tensor& e, Index half_width) {
    if (e.rank() != 1) {
        throw ShapeError("windowed_weights expects a rank-1 energy vector, got " +
                         shape_str(e.shape()));
    }
    if (half_width < 0) throw ValueError("half width must be non-negative");
    const Index steps = e.size();
    const Array& vals = e.values();

    // Per-step window statistics, reused by the backward closure.
    Array alpha(steps), win_max(steps), win_denom(steps);
    for (Index t = 0; t < steps; ++t) {
        const Index lo = std::max<Index>(0, t - half_width);
        const Index hi = std::min<Index>(steps - 1, t + half_width);
        const auto [mx, denom] = detail::shifted_exp_sum(vals, lo, hi);
        win_max[t] = mx;
        win_denom[t] = denom;
        alpha[t] = std::exp(vals[t] - mx) / denom;
    }

    // d alpha_t / d e_j = delta_tj alpha_t - alpha_t exp(e_j) / D_t for
    // j in win(t); windows are symmetric, so j in win(t) iff t in win(j).
    auto vjp = [half_width, steps, win_max, win_denom](detail::TensorNode& node) {
        const Array& a = node.values;
        const Array& g = node.grad;
        detail::TensorNode& parent = *node.parents[0];
        const Array& ev = parent.values;
        Array ge(steps);
        for (Index j = 0; j < steps; ++j) {
            const Index lo = std::max<Index>(0, j - half_width);
            const Index hi = std::min<Index>(steps - 1, j + half_width);
            double acc = 0.0;
            for (Index t = lo; t <= hi; ++t) {
                acc += g[t] * a[t] * std::exp(ev[j] - win_max[t]) / win_denom[t];
            }
            ge[j] = g[j] * a[j] - acc;
        }
        detail::accumulate(parent, ge);
    };

    return detail::make_op("windowed_weights", {steps}, std::move(alpha), {e}, std::move(vjp));
}

Tensor scale_context(const Tensor& alpha, const HiddenSequence& hidden) {
    if (alpha.rank() != 1 || alpha.size() != hidden.length()) {
        throw ShapeError("weights " + shape_str(alpha.shape()) + " do not match sequence length " +
                         std::to_string(hidden.length()));
    }
    return matvec(transpose(hidden.values), alpha);
}

std::pair<ContextVector, AttentionTrace> multi_scale_context(const HiddenSequence& hidden,
                                                             const MultiScaleParams& params) {
    params.validate();
    ContextVector context;
    AttentionTrace trace;
    context.per_scale.reserve(params.scales.size());
    trace.scales.reserve(params.scales.size());
    for (const auto& scale : params.scales) {
        Tensor e = energies(hidden, scale);
        Tensor alpha = windowed_weights(e, scale.half_width);
        context.per_scale.push_back(scale_context(alpha, hidden));

        ScaleTrace st;
        st.half_width = scale.half_width;
        st.energies.assign(e.values().data(), e.values().data() + e.size());
        st.weights.assign(alpha.values().data(), alpha.values().data() + alpha.size());
        trace.scales.push_back(std::move(st));
    }
    context.fused = concat(context.per_scale);
    return {std::move(context), std::move(trace)};
}

} // namespace seqmine
