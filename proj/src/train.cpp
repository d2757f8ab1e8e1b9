#include "seqmine/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "seqmine/graph.hpp"
#include "seqmine/ops.hpp"
#include "seqmine/random.hpp"

namespace seqmine {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTrainRngSalt = 0x9E3779B97F4A7C15ULL;
constexpr char kCheckpointMagic[8] = {'S', 'Q', 'M', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::uint64_t double_bits(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    return bits;
}

double bits_to_double(std::uint64_t bits) {
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void append_le64(std::string& out, std::uint64_t word) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((word >> (8 * b)) & 0xff));
}

std::uint64_t read_le64(const std::string& bytes, std::size_t offset) {
    std::uint64_t word = 0;
    for (int b = 0; b < 8; ++b) {
        word |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + b]))
                << (8 * b);
    }
    return word;
}

std::string two_decimals_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
    return buf;
}

std::string six_decimals(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ValueError("learning rate must be non-negative and finite");
    }
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ValueError("betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValueError("epsilon must be positive");
    if (batch_size < 1) throw ValueError("batch size must be >= 1");
    if (max_epochs < 1) throw ValueError("max epochs must be >= 1");
    if (patience < 1) throw ValueError("patience must be >= 1");
    if (clip_norm && !(*clip_norm > 0.0)) throw ValueError("clip norm must be positive");
}

AdamState AdamState::init(const ModelParams& params) {
    AdamState state;
    for (const auto& [name, tensor] : params.named()) {
        state.m.push_back(Array::Zero(tensor.size()));
        state.v.push_back(Array::Zero(tensor.size()));
    }
    return state;
}

void adam_step(const std::vector<std::pair<std::string, Tensor>>& params, AdamState& state,
               const TrainConfig& config) {
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("optimizer state does not match the parameter list");
    }
    // Validate every gradient before touching any parameter, so a bad step
    // leaves the model untouched.
    for (const auto& [name, tensor] : params) {
        if (!tensor.has_grad()) throw ValueError("gradient missing for " + name);
        if (!tensor.grad().allFinite()) throw ValueError("non-finite gradient in " + name);
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& [name, tensor] = params[i];
        const Array& g = tensor.grad();
        Array& m = state.m[i];
        Array& v = state.v[i];
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.square();
        Tensor t = tensor;
        Array& values = t.mutable_values();
        values -= config.learning_rate * (m / bc1) / ((v / bc2).sqrt() + config.epsilon);
        if (!values.allFinite()) throw ValueError("non-finite update in " + name);
    }
}

double clip_gradients(const std::vector<std::pair<std::string, Tensor>>& params,
                      double max_norm) {
    if (!(max_norm > 0.0)) throw ValueError("clip norm must be positive");
    double sq = 0.0;
    for (const auto& [name, tensor] : params) {
        if (!tensor.has_grad()) throw ValueError("gradient missing for " + name);
        sq += tensor.grad().square().sum();
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double factor = max_norm / norm;
        for (const auto& [name, tensor] : params) {
            Tensor t = tensor;
            t.node()->grad *= factor;
        }
    }
    return norm;
}

std::string RunHistory::csv() const {
    bool any_eval = false;
    for (const auto& e : epochs) any_eval = any_eval || e.eval_loss.has_value();
    std::ostringstream os;
    os << "epoch,loss,acc,precision,recall";
    if (any_eval) os << ",eval_loss,eval_acc,eval_precision,eval_recall";
    os << "\n";
    for (const auto& e : epochs) {
        os << e.epoch << ',' << six_decimals(e.loss) << ',' << two_decimals_percent(e.accuracy)
           << ',' << two_decimals_percent(e.precision) << ',' << two_decimals_percent(e.recall);
        if (any_eval) {
            if (e.eval_loss) {
                os << ',' << six_decimals(*e.eval_loss) << ','
                   << two_decimals_percent(*e.eval_accuracy) << ','
                   << two_decimals_percent(*e.eval_precision) << ','
                   << two_decimals_percent(*e.eval_recall);
            } else {
                os << ",,,,";
            }
        }
        os << "\n";
    }
    return os.str();
}

std::string RunHistory::json(bool include_wall_seconds) const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : epochs) {
        nlohmann::json rec{{"epoch", e.epoch},
                           {"loss", e.loss},
                           {"accuracy", e.accuracy},
                           {"precision", e.precision},
                           {"recall", e.recall}};
        if (include_wall_seconds) rec["wall_seconds"] = e.wall_seconds;
        if (e.eval_loss) {
            rec["eval_loss"] = *e.eval_loss;
            rec["eval_accuracy"] = *e.eval_accuracy;
            rec["eval_precision"] = *e.eval_precision;
            rec["eval_recall"] = *e.eval_recall;
        }
        out.push_back(std::move(rec));
    }
    return out.dump(2) + "\n";
}

Checkpoint Checkpoint::fresh(ModelParams params) {
    Checkpoint c;
    c.params = std::move(params);
    c.opt = AdamState::init(c.params);
    c.best_loss = std::numeric_limits<double>::infinity();
    return c;
}

std::string to_string(TrainStatus status) {
    switch (status) {
        case TrainStatus::completed: return "completed";
        case TrainStatus::early_stopped: return "early_stopped";
        case TrainStatus::diverged: return "diverged";
    }
    return "completed";
}

namespace {

Checkpoint clone_checkpoint(const Checkpoint& c) {
    Checkpoint copy = c;
    copy.params = c.params.clone();
    return copy;  // AdamState arrays copy by value already
}

struct EvalNumbers {
    double loss;
    EvalReport rep;
};

EvalNumbers evaluate_split(const SequenceDataset& data, const ModelParams& params) {
    std::vector<Index> preds;
    std::vector<Index> labels;
    preds.reserve(data.size());
    labels.reserve(data.size());
    double loss_sum = 0.0;
    for (const auto& sample : data.samples) {
        const Prediction pred = forward(sample.values, params);
        preds.push_back(pred.predicted_class);
        labels.push_back(sample.label);
        const double p = std::max(pred.probs.at(sample.label), 1e-12);
        loss_sum += -std::log(p);
    }
    EvalNumbers out;
    out.loss = loss_sum / static_cast<double>(data.size());
    out.rep = report(confusion(preds, labels, params.config.num_classes));
    return out;
}

} // namespace

TrainResult train(Checkpoint start, const SequenceDataset& train_set,
                  const SequenceDataset* eval_set, const TrainConfig& config) {
    config.validate();
    start.params.validate();
    if (train_set.samples.empty()) throw ValueError("training set is empty");
    if (train_set.channels != start.params.config.input_size) {
        throw ShapeError("training data has " + std::to_string(train_set.channels) +
                         " channels, model expects " +
                         std::to_string(start.params.config.input_size));
    }
    for (const auto& s : train_set.samples) {
        if (s.label < 0 || s.label >= start.params.config.num_classes) {
            throw ValueError("training label out of range for the model's class count");
        }
    }
    if (start.opt.empty()) start.opt = AdamState::init(start.params);
    if (start.class_names.empty()) start.class_names = train_set.class_names;

    std::mt19937_64 rng = start.rng_state.empty()
                              ? std::mt19937_64(config.seed ^ kTrainRngSalt)
                              : rng_state_from_string(start.rng_state);

    TrainResult result;
    result.state = std::move(start);
    Checkpoint last_good = clone_checkpoint(result.state);
    const auto named = result.state.params.named();
    const Index num_classes = result.state.params.config.num_classes;

    for (Index epoch = result.state.epoch + 1; epoch <= config.max_epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const auto batches = batch_indices(train_set.size(), static_cast<std::size_t>(config.batch_size), rng);

        double loss_sum = 0.0;
        std::vector<Index> preds;
        std::vector<Index> labels;
        preds.reserve(train_set.size());
        labels.reserve(train_set.size());
        std::string divergence;

        for (const auto& batch : batches) {
            std::vector<SequenceSample> view;
            view.reserve(batch.size());
            for (std::size_t idx : batch) {
                view.push_back(train_set.samples[idx]);
                labels.push_back(train_set.samples[idx].label);
            }
            try {
                result.state.params.zero_grads();
                Tensor loss = batch_loss(view, result.state.params, &preds);
                loss_sum += loss.scalar_value() * static_cast<double>(batch.size());
                backward(loss);
                if (config.clip_norm) clip_gradients(named, *config.clip_norm);
                adam_step(named, result.state.opt, config);
            } catch (const ValueError& e) {
                divergence = e.what();
                break;
            }
        }
        if (!divergence.empty()) {
            result.state = std::move(last_good);
            result.status = TrainStatus::diverged;
            result.note = "epoch " + std::to_string(epoch) + ": " + divergence;
            return result;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = loss_sum / static_cast<double>(train_set.size());
        const EvalReport train_rep = report(confusion(preds, labels, num_classes));
        rec.accuracy = train_rep.accuracy;
        rec.precision = train_rep.macro_precision;
        rec.recall = train_rep.macro_recall;

        std::optional<double> watched_eval;
        if (eval_set && !eval_set->samples.empty()) {
            const EvalNumbers ev = evaluate_split(*eval_set, result.state.params);
            rec.eval_loss = ev.loss;
            rec.eval_accuracy = ev.rep.accuracy;
            rec.eval_precision = ev.rep.macro_precision;
            rec.eval_recall = ev.rep.macro_recall;
            watched_eval = ev.loss;
        }

        const double watched =
            config.eval_stopping && watched_eval ? *watched_eval : rec.loss;
        if (watched < result.state.best_loss) {
            result.state.best_loss = watched;
            result.state.stale_epochs = 0;
        } else {
            result.state.stale_epochs += 1;
        }

        result.state.epoch = epoch;
        result.state.rng_state = rng_state_to_string(rng);
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.history.epochs.push_back(rec);
        last_good = clone_checkpoint(result.state);

        if (result.state.stale_epochs >= config.patience) {
            result.status = TrainStatus::early_stopped;
            return result;
        }
    }
    result.status = TrainStatus::completed;
    return result;
}

namespace {

json model_config_json(const ModelConfig& c) {
    return json{{"input_size", c.input_size},
                {"hidden_size", c.hidden_size},
                {"num_classes", c.num_classes},
                {"window_lengths", c.window_lengths}};
}

ModelConfig model_config_from_json(const json& j) {
    ModelConfig c;
    c.input_size = j.at("input_size").get<Index>();
    c.hidden_size = j.at("hidden_size").get<Index>();
    c.num_classes = j.at("num_classes").get<Index>();
    c.window_lengths = j.at("window_lengths").get<std::vector<Index>>();
    c.validate();
    return c;
}

/// Rebuilds ModelParams from payload arrays in named() order.
ModelParams params_from_arrays(const ModelConfig& config, std::vector<Array>& arrays,
                               std::size_t& index) {
    ModelParams p;
    p.config = config;
    const Index d = config.input_size;
    const Index h = config.hidden_size;
    auto take = [&](Shape shape) {
        if (index >= arrays.size()) throw IoError("checkpoint payload ended early");
        Array a = std::move(arrays[index++]);
        if (a.size() != shape_size(shape)) {
            throw IoError("checkpoint tensor size does not match the model config");
        }
        return Tensor(std::move(shape), std::move(a), /*requires_grad=*/true);
    };
    p.encoder.forward = {take({4 * h, d}), take({4 * h, h}), take({4 * h})};
    p.encoder.backward = {take({4 * h, d}), take({4 * h, h}), take({4 * h})};
    for (Index w : config.window_lengths) {
        p.attention.scales.push_back({take({1, 2 * h}), take({1}), (w - 1) / 2});
    }
    const Index fused = static_cast<Index>(config.window_lengths.size()) * 2 * h;
    p.head = {take({config.num_classes, fused}), take({config.num_classes})};
    p.validate();
    return p;
}

} // namespace

std::string checkpoint_to_bytes(const Checkpoint& state) {
    state.params.validate();
    const auto named = state.params.named();
    if (!state.opt.empty() &&
        (state.opt.m.size() != named.size() || state.opt.v.size() != named.size())) {
        throw ValueError("optimizer state does not match the parameter list");
    }

    json tensors = json::array();
    std::vector<const Array*> payload;
    for (const auto& [name, tensor] : named) {
        tensors.push_back(json{{"name", name}, {"shape", tensor.shape()}});
        payload.push_back(&tensor.values());
    }
    const AdamState opt = state.opt.empty() ? AdamState::init(state.params) : state.opt;
    for (std::size_t i = 0; i < named.size(); ++i) {
        tensors.push_back(json{{"name", "opt.m." + named[i].first},
                               {"shape", json::array({opt.m[i].size()})}});
        payload.push_back(&opt.m[i]);
    }
    for (std::size_t i = 0; i < named.size(); ++i) {
        tensors.push_back(json{{"name", "opt.v." + named[i].first},
                               {"shape", json::array({opt.v[i].size()})}});
        payload.push_back(&opt.v[i]);
    }

    json header{{"version", kCheckpointVersion},
                {"model", model_config_json(state.params.config)},
                {"trainer",
                 {{"epoch", state.epoch},
                  {"adam_step", opt.step},
                  {"best_loss_bits", double_bits(state.best_loss)},
                  {"stale_epochs", state.stale_epochs},
                  {"rng", state.rng_state}}},
                {"class_names", state.class_names},
                {"tensors", tensors}};
    json preprocess;
    preprocess["pad_length"] = state.pad_length ? json(*state.pad_length) : json(nullptr);
    if (state.znorm_stats) {
        preprocess["znorm"] =
            json{{"mean", state.znorm_stats->mean}, {"std", state.znorm_stats->stddev}};
    } else {
        preprocess["znorm"] = nullptr;
    }
    header["preprocess"] = preprocess;

    const std::string header_text = header.dump();
    std::string bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
    append_le64(bytes, header_text.size());
    bytes += header_text;
    for (const Array* a : payload) {
        for (Index i = 0; i < a->size(); ++i) append_le64(bytes, double_bits((*a)[i]));
    }
    return bytes;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
    if (bytes.size() < sizeof(kCheckpointMagic) + 8 ||
        std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
        throw IoError("not a checkpoint file");
    }
    const std::uint64_t header_len = read_le64(bytes, sizeof(kCheckpointMagic));
    const std::size_t header_off = sizeof(kCheckpointMagic) + 8;
    if (bytes.size() < header_off + header_len) throw IoError("truncated checkpoint header");

    json header;
    try {
        header = json::parse(bytes.substr(header_off, header_len));
    } catch (const json::exception& e) {
        throw IoError(std::string("corrupt checkpoint header: ") + e.what());
    }

    Checkpoint state;
    try {
        if (header.at("version").get<std::uint32_t>() != kCheckpointVersion) {
            throw IoError("unsupported checkpoint version " +
                          header.at("version").dump());
        }
        const ModelConfig config = model_config_from_json(header.at("model"));
        const json& tensors = header.at("tensors");

        std::size_t payload_off = header_off + header_len;
        std::vector<Array> arrays;
        std::vector<std::string> names;
        arrays.reserve(tensors.size());
        for (const auto& t : tensors) {
            Index count = 1;
            for (const auto& e : t.at("shape")) count *= e.get<Index>();
            if (bytes.size() < payload_off + static_cast<std::size_t>(count) * 8) {
                throw IoError("truncated checkpoint payload");
            }
            Array a(count);
            for (Index i = 0; i < count; ++i) {
                a[i] = bits_to_double(read_le64(bytes, payload_off));
                payload_off += 8;
            }
            arrays.push_back(std::move(a));
            names.push_back(t.at("name").get<std::string>());
        }
        if (payload_off != bytes.size()) throw IoError("checkpoint has trailing bytes");

        std::size_t index = 0;
        state.params = params_from_arrays(config, arrays, index);
        const auto named = state.params.named();
        for (std::size_t i = 0; i < named.size(); ++i) {
            if (names[i] != named[i].first) {
                throw IoError("checkpoint tensor order mismatch at " + names[i]);
            }
        }
        state.opt.m.reserve(named.size());
        state.opt.v.reserve(named.size());
        for (std::size_t i = 0; i < named.size(); ++i) state.opt.m.push_back(std::move(arrays[index++]));
        for (std::size_t i = 0; i < named.size(); ++i) state.opt.v.push_back(std::move(arrays[index++]));
        for (std::size_t i = 0; i < named.size(); ++i) {
            if (state.opt.m[i].size() != named[i].second.size() ||
                state.opt.v[i].size() != named[i].second.size()) {
                throw IoError("optimizer moment shapes disagree with the parameters");
            }
        }

        const json& trainer = header.at("trainer");
        state.epoch = trainer.at("epoch").get<Index>();
        state.opt.step = trainer.at("adam_step").get<std::int64_t>();
        state.best_loss = bits_to_double(trainer.at("best_loss_bits").get<std::uint64_t>());
        state.stale_epochs = trainer.at("stale_epochs").get<Index>();
        state.rng_state = trainer.at("rng").get<std::string>();
        state.class_names = header.at("class_names").get<std::vector<std::string>>();

        const json& preprocess = header.at("preprocess");
        if (!preprocess.at("pad_length").is_null()) {
            state.pad_length = preprocess.at("pad_length").get<Index>();
        }
        if (!preprocess.at("znorm").is_null()) {
            ChannelStats stats;
            stats.mean = preprocess.at("znorm").at("mean").get<std::vector<double>>();
            stats.stddev = preprocess.at("znorm").at("std").get<std::vector<double>>();
            state.znorm_stats = std::move(stats);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("corrupt checkpoint header: ") + e.what());
    }
    return state;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& state) {
    const std::string bytes = checkpoint_to_bytes(state);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failure on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return checkpoint_from_bytes(buf.str());
}

} // namespace seqmine
