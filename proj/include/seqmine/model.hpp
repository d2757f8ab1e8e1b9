#ifndef SEQMINE_MODEL_HPP
#define SEQMINE_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqmine/attention.hpp"
#include "seqmine/data.hpp"
#include "seqmine/lstm.hpp"
#include "seqmine/tensor.hpp"

namespace seqmine {

struct ClassifierHead {
    Tensor weight;  // [C, S * 2h]
    Tensor bias;    // [C]

    Index num_classes() const { return weight.rows(); }
    Index input_size() const { return weight.cols(); }

    /// weight uniform(-1/sqrt(S*2h), 1/sqrt(S*2h)), bias zero.
    static ClassifierHead init(Index num_classes, Index input_size, std::mt19937_64& rng);

    void validate() const;
};

struct ModelConfig {
    Index input_size = 0;   // d
    Index hidden_size = 64; // h per direction
    Index num_classes = 0;  // C
    std::vector<Index> window_lengths = {3, 7, 11};

    void validate() const;
};

/// All trainable parameters of the classifier, plus the configuration they
/// were built from.
struct ModelParams {
    ModelConfig config;
    BiLstmParams encoder;
    MultiScaleParams attention;
    ClassifierHead head;

    static ModelParams init(const ModelConfig& config, std::uint64_t seed);

    /// Stable name -> tensor enumeration; the canonical parameter order for
    /// the optimizer, gradient checks, and checkpoints.
    std::vector<std::pair<std::string, Tensor>> named() const;

    void zero_grads() const;
    void validate() const;

    /// Deep copy with fresh leaf tensors (used for retained snapshots).
    ModelParams clone() const;
};

struct Prediction {
    Tensor probs;  // detached [C], sums to 1 within 1e-12
    Index predicted_class = 0;
    AttentionTrace trace;
};

/// Graph-attached class probabilities softmax(W_c c + b_c) for one
/// sequence. Optionally records the attention trace.
Tensor forward_probs(const Tensor& x, const ModelParams& p, AttentionTrace* trace = nullptr);

/// Inference entry point: detached probabilities, argmax, attention trace.
Prediction forward(const Tensor& x, const ModelParams& p);

/// L = -log(max(probs[label], 1e-12)); the floor guards saturated heads.
Tensor cross_entropy(const Tensor& probs, Index label);

/// Mean per-sample cross entropy over the batch. When predictions is
/// non-null, the argmax class of each sample is appended to it.
Tensor batch_loss(std::span<const SequenceSample> batch, const ModelParams& p,
                  std::vector<Index>* predictions = nullptr);

} // namespace seqmine

#endif
