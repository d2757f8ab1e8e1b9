#ifndef SEQMINE_TRAIN_HPP
#define SEQMINE_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqmine/data.hpp"
#include "seqmine/metrics.hpp"
#include "seqmine/model.hpp"

namespace seqmine {

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    Index batch_size = 16;
    Index max_epochs = 200;
    std::uint64_t seed = 0;
    Index patience = 20;                    // epochs without loss improvement
    std::optional<double> clip_norm;        // global-norm gradient clip
    bool eval_stopping = false;             // stop on eval loss instead of train loss

    void validate() const;
};

/// First and second moment estimates, aligned with ModelParams::named().
struct AdamState {
    std::vector<Array> m;
    std::vector<Array> v;
    std::int64_t step = 0;

    static AdamState init(const ModelParams& params);
    bool empty() const { return m.empty(); }
};

/// One Adam update with bias correction: theta -= lr * m_hat / (sqrt(v_hat) + eps).
/// Throws ValueError naming the tensor on a non-finite gradient or update.
void adam_step(const std::vector<std::pair<std::string, Tensor>>& params, AdamState& state,
               const TrainConfig& config);

/// Scales all gradients so the global L2 norm is at most max_norm.
/// Returns the pre-clip norm.
double clip_gradients(const std::vector<std::pair<std::string, Tensor>>& params, double max_norm);

struct EpochRecord {
    Index epoch = 0;        // 1-based
    double loss = 0.0;      // mean train cross entropy
    double accuracy = 0.0;  // train split
    double precision = 0.0;
    double recall = 0.0;
    std::optional<double> eval_loss;
    std::optional<double> eval_accuracy;
    std::optional<double> eval_precision;
    std::optional<double> eval_recall;
    double wall_seconds = 0.0;
};

struct RunHistory {
    std::vector<EpochRecord> epochs;

    /// epoch,loss,acc,precision,recall[,eval columns]; metrics as
    /// percentages with two decimals, loss with six. Wall time is kept out
    /// of the CSV so reruns are byte-identical.
    std::string csv() const;
    /// Pass include_wall_seconds=false for byte-identical reruns.
    std::string json(bool include_wall_seconds = true) const;
};

/// Full resumable training state; exactly what the checkpoint file stores.
struct Checkpoint {
    ModelParams params;
    AdamState opt;
    std::string rng_state;  // empty until training has started
    Index epoch = 0;
    double best_loss = 0.0;
    Index stale_epochs = 0;
    std::vector<std::string> class_names;
    // preprocessing recipe applied at training time, replayed at eval time
    std::optional<Index> pad_length;
    std::optional<ChannelStats> znorm_stats;

    static Checkpoint fresh(ModelParams params);
};

enum class TrainStatus { completed, early_stopped, diverged };

std::string to_string(TrainStatus status);

struct TrainResult {
    Checkpoint state;    // final state; on divergence, the last good one
    RunHistory history;  // records up to the last completed epoch
    TrainStatus status = TrainStatus::completed;
    std::string note;    // divergence diagnostic
};

/// Epochs of shuffled mini-batches: forward, backward, optional clip, Adam.
/// Deterministic under (datasets, config, start state). Resuming from a
/// returned checkpoint continues the identical run.
TrainResult train(Checkpoint start, const SequenceDataset& train_set,
                  const SequenceDataset* eval_set, const TrainConfig& config);

/// Binary checkpoint: magic, little-endian JSON header (version, model
/// config, shapes, trainer state), then raw 64-bit float payloads.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& state);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Serialize to an in-memory buffer (the file functions wrap these).
std::string checkpoint_to_bytes(const Checkpoint& state);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

} // namespace seqmine

#endif
