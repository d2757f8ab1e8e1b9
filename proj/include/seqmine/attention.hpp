#ifndef SEQMINE_ATTENTION_HPP
#define SEQMINE_ATTENTION_HPP

#include <random>
#include <utility>
#include <vector>

#include "seqmine/lstm.hpp"
#include "seqmine/tensor.hpp"

namespace seqmine {

/// One attention head: scalar energy per step from an affine map of the
/// hidden state, normalized over a window of half_width steps either side.
struct AttentionScaleParams {
    Tensor weight;     // [1, 2h]
    Tensor bias;       // scalar [1]
    Index half_width;  // window reaches [t - half_width, t + half_width]

    Index encoder_width() const { return weight.cols(); }
    Index window_length() const { return 2 * half_width + 1; }

    /// uniform(-1/sqrt(2h), 1/sqrt(2h)) initialization for weight and bias.
    static AttentionScaleParams init(Index encoder_width, Index half_width, std::mt19937_64& rng);

    void validate() const;
};

struct MultiScaleParams {
    std::vector<AttentionScaleParams> scales;

    Index num_scales() const { return static_cast<Index>(scales.size()); }

    /// One head per window length; each length must be odd (half width
    /// (W - 1) / 2).
    static MultiScaleParams init(Index encoder_width, const std::vector<Index>& window_lengths,
                                 std::mt19937_64& rng);

    void validate() const;
};

/// Detached per-scale energies and weights kept for inspection and tests.
struct ScaleTrace {
    Index half_width = 0;
    std::vector<double> energies;  // e_t, length T
    std::vector<double> weights;   // alpha_t, length T
};

struct AttentionTrace {
    std::vector<ScaleTrace> scales;
};

/// Per-scale context vectors and their in-order concatenation.
struct ContextVector {
    std::vector<Tensor> per_scale;  // each [2h]
    Tensor fused;                   // [S * 2h]
};

/// e_t = tanh(w . h_t + b) for every step; values in (-1, 1).
Tensor energies(const HiddenSequence& hidden, const AttentionScaleParams& scale);

/// alpha_t = exp(e_t) / sum_{k in win(t)} exp(e_k), where win(t) is
/// [t - half_width, t + half_width] clamped to the sequence. Each entry is
/// computed from the max-shifted numerator/denominator of its own window.
/// The entries do not sum to 1 in general; for half_width >= T - 1 this
/// reduces to the full-sequence softmax.
Tensor windowed_weights(const Tensor& e, Index half_width);

/// c = sum_t alpha_t h_t over the full sequence.
Tensor scale_context(const Tensor& alpha, const HiddenSequence& hidden);

/// Runs energies -> windowed_weights -> scale_context per scale and
/// concatenates the contexts in scale order.
std::pair<ContextVector, AttentionTrace> multi_scale_context(const HiddenSequence& hidden,
                                                             const MultiScaleParams& params);

} // namespace seqmine

#endif
