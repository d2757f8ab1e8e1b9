#ifndef SEQMINE_CLI_HPP
#define SEQMINE_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqmine/data.hpp"
#include "seqmine/metrics.hpp"
#include "seqmine/train.hpp"

namespace seqmine::cli {

namespace exit_code {
constexpr int ok = 0;
constexpr int validation = 2;
constexpr int io = 3;
constexpr int diverged = 4;
constexpr int internal = 5;
} // namespace exit_code

/// Fully resolved run description: defaults, overlaid by the JSON config
/// file, overlaid by command-line flags (flags win).
struct RunSpec {
    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    std::optional<std::filesystem::path> data_train;
    std::optional<std::filesystem::path> data_test;
    std::optional<SynthSpec> synth;  // used when no train file is given
    std::optional<Index> pad_length;
    bool znorm = true;
    Index hidden_size = 64;
    std::vector<Index> window_lengths = {3, 7, 11};
    TrainConfig train;
    std::vector<Index> sweep_lengths = {20, 60, 100, 140, 180, 200};
    std::vector<Index> sweep_windows = {3, 7, 11};
    Averaging averaging = Averaging::macro;
    std::string model_name = "bilstm-msattn";
    std::filesystem::path checkpoint;
    Index sample_index = 0;
};

/// Parses the JSON run-spec file; unknown keys are rejected.
RunSpec spec_from_json_text(const std::string& text, const RunSpec& base);

/// Atomic file write: temp file in the same directory, rename on success.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Command entry points. Each writes its artifacts under spec.out and
// returns a process exit code; invalid input surfaces as exceptions that
// run() maps onto exit codes.
int cmd_synth(const RunSpec& spec);
int cmd_train(const RunSpec& spec);
int cmd_eval(const RunSpec& spec);
int cmd_sweep_length(const RunSpec& spec);
int cmd_sweep_window(const RunSpec& spec);
int cmd_inspect_attention(const RunSpec& spec);

/// One sweep grid point: trains and evaluates a fresh model, returning the
/// test-split report.
using SweepRunner = std::function<EvalReport(Index point, std::uint64_t point_seed)>;

/// Shared sweep harness: one CSV row per grid point, cells that throw are
/// kept and marked failed while the sweep continues. Per-point seeds are
/// seed XOR point index.
std::string sweep_csv(const std::vector<Index>& points, const std::string& point_column,
                      std::uint64_t seed, const SweepRunner& runner);

/// Full CLI: parse argv, dispatch, map errors to exit codes.
int run(int argc, const char* const* argv);

} // namespace seqmine::cli

#endif
