#include "seqmine/model.hpp"

#include <cmath>

#include "seqmine/ops.hpp"
#include "seqmine/random.hpp"

namespace seqmine {

namespace {
constexpr double kProbFloor = 1e-12;
}

ClassifierHead ClassifierHead::init(Index num_classes, Index input_size, std::mt19937_64& rng) {
    if (num_classes < 2) throw ValueError("classifier needs at least 2 classes");
    if (input_size < 1) throw ValueError("classifier input size must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(input_size));
    ClassifierHead head;
    head.weight = uniform_tensor({num_classes, input_size}, -bound, bound, rng);
    head.bias = Tensor::zeros({num_classes}, /*requires_grad=*/true);
    return head;
}

void ClassifierHead::validate() const {
    if (weight.rank() != 2 || bias.rank() != 1 || bias.size() != weight.rows()) {
        throw ShapeError("classifier head shapes disagree: weight " + shape_str(weight.shape()) +
                         ", bias " + shape_str(bias.shape()));
    }
    if (num_classes() < 2) throw ValueError("classifier needs at least 2 classes");
}

void ModelConfig::validate() const {
    if (input_size < 1) throw ValueError("model input_size must be positive");
    if (hidden_size < 1) throw ValueError("model hidden_size must be positive");
    if (num_classes < 2) throw ValueError("model num_classes must be at least 2");
    if (window_lengths.empty()) throw ValueError("model needs at least one attention window");
    for (Index w : window_lengths) {
        if (w < 1 || w % 2 == 0) {
            throw ValueError("window lengths must be odd and >= 1, got " + std::to_string(w));
        }
    }
}

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    ModelParams p;
    p.config = config;
    p.encoder = BiLstmParams::init(config.input_size, config.hidden_size, rng);
    p.attention = MultiScaleParams::init(2 * config.hidden_size, config.window_lengths, rng);
    p.head = ClassifierHead::init(
        config.num_classes,
        static_cast<Index>(config.window_lengths.size()) * 2 * config.hidden_size, rng);
    return p;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("encoder.forward.input_weights", encoder.forward.input_weights);
    out.emplace_back("encoder.forward.recurrent_weights", encoder.forward.recurrent_weights);
    out.emplace_back("encoder.forward.bias", encoder.forward.bias);
    out.emplace_back("encoder.backward.input_weights", encoder.backward.input_weights);
    out.emplace_back("encoder.backward.recurrent_weights", encoder.backward.recurrent_weights);
    out.emplace_back("encoder.backward.bias", encoder.backward.bias);
    for (std::size_t s = 0; s < attention.scales.size(); ++s) {
        const std::string prefix = "attention.scale" + std::to_string(s);
        out.emplace_back(prefix + ".weight", attention.scales[s].weight);
        out.emplace_back(prefix + ".bias", attention.scales[s].bias);
    }
    out.emplace_back("head.weight", head.weight);
    out.emplace_back("head.bias", head.bias);
    return out;
}

void ModelParams::zero_grads() const {
    for (auto& [name, tensor] : named()) {
        Tensor t = tensor;
        t.zero_grad();
    }
}

void ModelParams::validate() const {
    config.validate();
    encoder.validate();
    attention.validate();
    head.validate();
    if (encoder.input_size() != config.input_size || encoder.hidden_size() != config.hidden_size) {
        throw ShapeError("encoder parameters do not match the model config");
    }
    const Index width = 2 * config.hidden_size;
    if (attention.num_scales() != static_cast<Index>(config.window_lengths.size())) {
        throw ShapeError("attention scale count does not match the config windows");
    }
    for (std::size_t s = 0; s < attention.scales.size(); ++s) {
        if (attention.scales[s].encoder_width() != width ||
            attention.scales[s].window_length() != config.window_lengths[s]) {
            throw ShapeError("attention scale " + std::to_string(s) +
                             " does not match the model config");
        }
    }
    if (head.num_classes() != config.num_classes ||
        head.input_size() != attention.num_scales() * width) {
        throw ShapeError("classifier head does not match the fused context size");
    }
}

ModelParams ModelParams::clone() const {
    ModelParams copy;
    copy.config = config;
    auto dup = [](const Tensor& t) { return Tensor(t.shape(), t.values(), t.requires_grad()); };
    copy.encoder.forward = {dup(encoder.forward.input_weights),
                            dup(encoder.forward.recurrent_weights), dup(encoder.forward.bias)};
    copy.encoder.backward = {dup(encoder.backward.input_weights),
                             dup(encoder.backward.recurrent_weights), dup(encoder.backward.bias)};
    for (const auto& s : attention.scales) {
        copy.attention.scales.push_back({dup(s.weight), dup(s.bias), s.half_width});
    }
    copy.head = {dup(head.weight), dup(head.bias)};
    return copy;
}

Tensor forward_probs(const Tensor& x, const ModelParams& p, AttentionTrace* trace) {
    p.validate();
    if (x.rank() != 2 || x.cols() != p.config.input_size) {
        throw ShapeError("forward expects [T," + std::to_string(p.config.input_size) +
                         "] input, got " + shape_str(x.shape()));
    }
    const HiddenSequence hidden = bilstm_encode(x, p.encoder);
    auto [context, attn_trace] = multi_scale_context(hidden, p.attention);
    if (trace) *trace = std::move(attn_trace);
    Tensor logits = add(matvec(p.head.weight, context.fused), p.head.bias);
    return softmax_slice(logits, 0, p.config.num_classes - 1);
}

Prediction forward(const Tensor& x, const ModelParams& p) {
    Prediction out;
    Tensor probs = forward_probs(x, p, &out.trace);
    out.probs = probs.detach();
    Index best = 0;
    for (Index i = 1; i < probs.size(); ++i) {
        if (probs.at(i) > probs.at(best)) best = i;
    }
    out.predicted_class = best;
    return out;
}

Tensor cross_entropy(const Tensor& probs, Index label) {
    if (probs.rank() != 1) {
        throw ShapeError("cross_entropy expects a probability vector, got " +
                         shape_str(probs.shape()));
    }
    if (label < 0 || label >= probs.size()) {
        throw BoundsError("label " + std::to_string(label) + " out of range for " +
                          std::to_string(probs.size()) + " classes");
    }
    Tensor picked = segment(probs, label, 1);
    return scale(log(clamp_min(picked, kProbFloor)), -1.0);
}

Tensor batch_loss(std::span<const SequenceSample> batch, const ModelParams& p,
                  std::vector<Index>* predictions) {
    if (batch.empty()) throw ValueError("batch_loss on an empty batch");
    std::vector<Tensor> losses;
    losses.reserve(batch.size());
    for (const SequenceSample& sample : batch) {
        Tensor probs = forward_probs(sample.values, p);
        if (predictions) {
            Index best = 0;
            for (Index i = 1; i < probs.size(); ++i) {
                if (probs.at(i) > probs.at(best)) best = i;
            }
            predictions->push_back(best);
        }
        losses.push_back(cross_entropy(probs, sample.label));
    }
    Tensor total = losses.front();
    for (std::size_t i = 1; i < losses.size(); ++i) total = add(total, losses[i]);
    return scale(total, 1.0 / static_cast<double>(batch.size()));
}

} // namespace seqmine
