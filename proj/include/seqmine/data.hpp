#ifndef SEQMINE_DATA_HPP
#define SEQMINE_DATA_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// One labeled multivariate sequence: time-major values with one column
/// per channel.
struct SequenceSample {
    Tensor values;  // [T, d]
    Index label = 0;

    Index length() const { return values.rows(); }
    Index channels() const { return values.cols(); }
};

struct SequenceDataset {
    std::vector<SequenceSample> samples;
    std::vector<std::string> class_names;  // index == label
    Index channels = 0;
    std::string problem_name;
    std::string split;  // "train", "test", ...

    Index num_classes() const { return static_cast<Index>(class_names.size()); }
    std::size_t size() const { return samples.size(); }
};

/// Parses a UEA-style `.ts` text file: `@`-directive header, then one line
/// per sample with `:`-separated channels, comma-separated values, and a
/// trailing class label. Missing values (`?`) are imputed by per-channel
/// linear interpolation with held edges. Malformed content is reported
/// with its line number.
SequenceDataset parse_ts(const std::filesystem::path& path);
SequenceDataset parse_ts_text(const std::string& text, const std::string& source_name);

/// Inverse of parse_ts for conforming datasets; value text round-trips
/// doubles exactly.
std::string serialize_ts(const SequenceDataset& dataset);

/// Keeps the first `length` steps, or appends zero rows. Labels preserved.
SequenceSample pad_or_trim(const SequenceSample& sample, Index length);
SequenceDataset pad_or_trim(const SequenceDataset& dataset, Index length);

struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std, floored at 1e-8 on apply
};

/// Per-channel statistics over every step of every sample. Fit these on
/// the training split only.
ChannelStats fit_channel_stats(const SequenceDataset& train);

/// (x - mean) / max(std, 1e-8) per channel.
SequenceDataset apply_znorm(const SequenceDataset& dataset, const ChannelStats& stats);

/// Recipe for the synthetic motif surrogate: every class gets a fixed
/// smooth-bump motif injected at a random position into Gaussian noise.
struct SynthSpec {
    Index num_classes = 4;
    Index samples_per_class = 75;  // pool size per class before the 2:1 split
    Index length = 50;
    Index channels = 3;
    Index motif_length = 12;
    double noise = 0.3;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthDataset {
    SequenceDataset train;
    SequenceDataset test;
    std::vector<Tensor> motifs;  // per class, [motif_length, channels]
};

/// Deterministic under the seed; per class, the first 2/3 of the pool goes
/// to the train split and the rest to test.
SynthDataset synth_motif_dataset(const SynthSpec& spec);

/// Brute-force nearest-motif classifier: slides every class motif over the
/// sample and picks the class with the smallest squared distance at its
/// best alignment. The independent solvability oracle for synthetic data.
Index nearest_motif_class(const SequenceSample& sample, std::span<const Tensor> motifs);

/// Index batches for one epoch: seeded shuffle, final short batch kept.
std::vector<std::vector<std::size_t>> batch_indices(std::size_t count, std::size_t batch_size,
                                                    std::mt19937_64& rng);

} // namespace seqmine

#endif
