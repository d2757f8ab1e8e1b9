#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "seqmine/cli.hpp"

using namespace seqmine;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("seqmine_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("seqmine");
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// tiny synthetic data + model so CLI tests stay fast
std::vector<std::string> small_train_flags(const fs::path& data, const fs::path& out) {
    return {"train",          "--data-train", (data / "train.ts").string(),
            "--data-test",    (data / "test.ts").string(),
            "--out",          out.string(),
            "--seed",         "7",
            "--hidden",       "4",
            "--windows",      "3,7",
            "--epochs",       "3",
            "--batch",        "6"};
}

fs::path make_synth(const std::string& name) {
    const fs::path dir = temp_dir("data_" + name);
    const int code = run_cli({"synth", "--out", dir.string(), "--seed", "5", "--classes", "3",
                              "--per-class", "9", "--length", "12", "--channels", "2",
                              "--motif-length", "4", "--noise", "0.2"});
    REQUIRE(code == cli::exit_code::ok);
    return dir;
}

} // namespace

TEST_CASE("synth writes parseable .ts splits") {
    const fs::path dir = make_synth("synth");
    const SequenceDataset train = parse_ts(dir / "train.ts");
    const SequenceDataset test = parse_ts(dir / "test.ts");
    CHECK(train.channels == 2);
    CHECK(train.num_classes() == 3);
    CHECK(train.size() == 18);  // 6 per class
    CHECK(test.size() == 9);
}

TEST_CASE("train writes checkpoint, history, and eval artifacts") {
    const fs::path data = make_synth("train");
    const fs::path out = temp_dir("train_out");
    const int code = run_cli(small_train_flags(data, out));
    CHECK(code == cli::exit_code::ok);
    CHECK(fs::exists(out / "checkpoint.bin"));
    CHECK(fs::exists(out / "history.csv"));
    CHECK(fs::exists(out / "history.json"));
    CHECK(fs::exists(out / "eval.json"));
    CHECK(fs::exists(out / "eval.csv"));

    const std::string csv = slurp(out / "history.csv");
    CHECK(csv.rfind("epoch,loss,acc,precision,recall", 0) == 0);
    // no stray temp files left behind
    for (const auto& entry : fs::directory_iterator(out)) {
        CHECK(entry.path().extension() != ".tmp");
    }
}

TEST_CASE("train reruns are byte identical") {
    const fs::path data = make_synth("deterministic");
    const fs::path out1 = temp_dir("det_out1");
    const fs::path out2 = temp_dir("det_out2");
    REQUIRE(run_cli(small_train_flags(data, out1)) == cli::exit_code::ok);
    REQUIRE(run_cli(small_train_flags(data, out2)) == cli::exit_code::ok);
    CHECK(slurp(out1 / "history.csv") == slurp(out2 / "history.csv"));
    CHECK(slurp(out1 / "history.json") == slurp(out2 / "history.json"));
    CHECK(slurp(out1 / "eval.json") == slurp(out2 / "eval.json"));
    CHECK(slurp(out1 / "checkpoint.bin") == slurp(out2 / "checkpoint.bin"));
}

TEST_CASE("eval on a saved checkpoint reproduces the training-time report") {
    const fs::path data = make_synth("eval");
    const fs::path out = temp_dir("eval_out");
    REQUIRE(run_cli(small_train_flags(data, out)) == cli::exit_code::ok);

    const fs::path out2 = temp_dir("eval_out2");
    const int code = run_cli({"eval", "--checkpoint", (out / "checkpoint.bin").string(),
                              "--data-test", (data / "test.ts").string(), "--out", out2.string()});
    CHECK(code == cli::exit_code::ok);
    CHECK(slurp(out / "eval.json") == slurp(out2 / "eval.json"));
}

TEST_CASE("missing input file maps to the io exit code without partial outputs") {
    const fs::path out = temp_dir("missing_out");
    const int code = run_cli({"train", "--data-train", "/nonexistent/nope.ts", "--out",
                              out.string(), "--epochs", "1"});
    CHECK(code == cli::exit_code::io);
    CHECK(fs::is_empty(out));
}

TEST_CASE("even window length fails validation before any training") {
    const fs::path data = make_synth("evenwin");
    const fs::path out = temp_dir("evenwin_out");
    const int code = run_cli({"sweep-window", "--data-train", (data / "train.ts").string(),
                              "--data-test", (data / "test.ts").string(), "--out", out.string(),
                              "--window-grid", "3,4", "--epochs", "1", "--hidden", "3"});
    CHECK(code == cli::exit_code::validation);
    CHECK_FALSE(fs::exists(out / "sweep_window.csv"));
}

TEST_CASE("sweep-length: one row per point, duplicates identical, singleton matches train") {
    const fs::path data = make_synth("sweeplen");
    const fs::path out = temp_dir("sweeplen_out");
    const int code = run_cli({"sweep-length", "--data-train", (data / "train.ts").string(),
                              "--data-test", (data / "test.ts").string(), "--out", out.string(),
                              "--lengths", "10,10,14", "--seed", "7", "--hidden", "4",
                              "--windows", "3,7", "--epochs", "3", "--batch", "6"});
    REQUIRE(code == cli::exit_code::ok);
    const std::string csv = slurp(out / "sweep_length.csv");

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "length,acc,precision,recall,status");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    // duplicate grid points give identical rows
    CHECK(rows[0] == rows[1]);
    for (const auto& r : rows) CHECK(r.find(",ok") != std::string::npos);

    // singleton sweep equals a plain train at that length and seed
    const fs::path single_out = temp_dir("sweeplen_single");
    REQUIRE(run_cli({"sweep-length", "--data-train", (data / "train.ts").string(), "--data-test",
                     (data / "test.ts").string(), "--out", single_out.string(), "--lengths", "10",
                     "--seed", "7", "--hidden", "4", "--windows", "3,7", "--epochs", "3",
                     "--batch", "6"}) == cli::exit_code::ok);
    const fs::path train_out = temp_dir("sweeplen_train");
    auto flags = small_train_flags(data, train_out);
    flags.push_back("--length");
    flags.push_back("10");
    REQUIRE(run_cli(flags) == cli::exit_code::ok);

    const std::string sweep_row = slurp(single_out / "sweep_length.csv");
    const std::string eval_csv = slurp(train_out / "eval.csv");
    // eval.csv: "model,acc,precision,recall\n<name>,A,P,R\n"
    const std::string tail = eval_csv.substr(eval_csv.find('\n') + 1);
    const std::string metrics = tail.substr(tail.find(',') + 1);
    CHECK(sweep_row.find("10," + metrics.substr(0, metrics.size() - 1) + ",ok") !=
          std::string::npos);
}

TEST_CASE("sweep harness marks failed cells and keeps going") {
    const std::vector<Index> points = {3, 5, 7};
    const std::string csv =
        cli::sweep_csv(points, "window", 9, [](Index point, std::uint64_t) -> EvalReport {
            if (point == 5) throw ValueError("injected failure, with a comma");
            EvalReport r;
            r.accuracy = 0.5;
            r.macro_precision = 0.25;
            r.macro_recall = 0.75;
            return r;
        });
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "3,50.00,25.00,75.00,ok");
    CHECK(rows[1].rfind("5,,,,failed: ", 0) == 0);
    CHECK(rows[1].find(',') != std::string::npos);
    CHECK(rows[2] == "7,50.00,25.00,75.00,ok");
}

TEST_CASE("inspect-attention emits a trace satisfying the window identities") {
    const fs::path data = make_synth("inspect");
    const fs::path out = temp_dir("inspect_out");
    // include one window that covers the whole padded sequence (T=12)
    auto flags = small_train_flags(data, out);
    for (auto& f : flags) {
        if (f == "3,7") f = "3,25";
    }
    REQUIRE(run_cli(flags) == cli::exit_code::ok);

    const fs::path out2 = temp_dir("inspect_trace");
    const int code = run_cli({"inspect-attention", "--checkpoint",
                              (out / "checkpoint.bin").string(), "--data-test",
                              (data / "test.ts").string(), "--sample", "1", "--out",
                              out2.string()});
    REQUIRE(code == cli::exit_code::ok);

    const json trace = json::parse(slurp(out2 / "attention_trace.json"));
    CHECK(trace.at("sample_index") == 1);
    CHECK(trace.at("probs").size() == 3);
    double prob_sum = 0.0;
    for (double p : trace.at("probs")) prob_sum += p;
    CHECK(std::abs(prob_sum - 1.0) < 1e-9);

    REQUIRE(trace.at("scales").size() == 2);
    for (const auto& scale : trace.at("scales")) {
        const auto e = scale.at("energies").get<std::vector<double>>();
        const auto alpha = scale.at("weights").get<std::vector<double>>();
        const auto w = scale.at("half_width").get<Index>();
        REQUIRE(e.size() == alpha.size());
        const Index steps = static_cast<Index>(e.size());
        // recompute the denominators from the emitted energies
        for (Index t = 0; t < steps; ++t) {
            double denom = 0.0;
            for (Index k = std::max<Index>(0, t - w); k <= std::min<Index>(steps - 1, t + w); ++k) {
                denom += std::exp(e[static_cast<std::size_t>(k)]);
            }
            CHECK(std::abs(alpha[static_cast<std::size_t>(t)] * denom -
                           std::exp(e[static_cast<std::size_t>(t)])) < 1e-12);
        }
        if (w >= steps - 1) {
            double sum = 0.0;
            for (double a : alpha) sum += a;
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }

    // out-of-range sample index is a validation failure
    CHECK(run_cli({"inspect-attention", "--checkpoint", (out / "checkpoint.bin").string(),
                   "--data-test", (data / "test.ts").string(), "--sample", "999", "--out",
                   out2.string()}) == cli::exit_code::validation);
}

TEST_CASE("config file is honored and flags win over it") {
    const fs::path dir = temp_dir("config");
    const fs::path cfg = dir / "run.json";
    {
        std::ofstream out(cfg);
        out << R"({"seed": 3, "model": {"hidden": 5, "windows": [3]},
                   "train": {"epochs": 2, "lr": 0.01},
                   "synth": {"classes": 2, "samples_per_class": 6, "length": 10,
                             "channels": 2, "motif_length": 3, "noise": 0.1}})";
    }
    const fs::path out1 = temp_dir("config_out1");
    const int code = run_cli({"train", "--config", cfg.string(), "--out", out1.string()});
    CHECK(code == cli::exit_code::ok);
    CHECK(fs::exists(out1 / "checkpoint.bin"));

    // flags override: epochs 1 -> exactly one history row
    const fs::path out2 = temp_dir("config_out2");
    REQUIRE(run_cli({"train", "--config", cfg.string(), "--out", out2.string(), "--epochs",
                     "1"}) == cli::exit_code::ok);
    const std::string csv = slurp(out2 / "history.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row

    // unknown keys are rejected
    const fs::path bad = dir / "bad.json";
    {
        std::ofstream out(bad);
        out << R"({"sede": 3})";
    }
    CHECK(run_cli({"train", "--config", bad.string(), "--out", out1.string()}) ==
          cli::exit_code::validation);
}

TEST_CASE("spec_from_json_text parses every section") {
    cli::RunSpec base;
    const cli::RunSpec spec = cli::spec_from_json_text(
        R"({"seed": 11, "out": "somewhere", "averaging": "weighted",
            "data": {"train": "a.ts", "test": "b.ts", "length": 40, "znorm": false},
            "model": {"hidden": 12, "windows": [5, 9]},
            "train": {"lr": 0.5, "beta1": 0.8, "beta2": 0.9, "eps": 1e-9, "batch": 3,
                      "epochs": 7, "patience": 2, "clip": 1.5, "eval_stopping": true},
            "sweep": {"lengths": [10, 20], "windows": [3]}})",
        base);
    CHECK(spec.seed == 11);
    CHECK(spec.out == "somewhere");
    CHECK(spec.averaging == Averaging::weighted);
    CHECK(spec.data_train == fs::path("a.ts"));
    CHECK(spec.pad_length == 40);
    CHECK_FALSE(spec.znorm);
    CHECK(spec.hidden_size == 12);
    CHECK(spec.window_lengths == std::vector<Index>{5, 9});
    CHECK(spec.train.learning_rate == 0.5);
    CHECK(spec.train.clip_norm == 1.5);
    CHECK(spec.train.eval_stopping);
    CHECK(spec.sweep_lengths == std::vector<Index>{10, 20});
    CHECK_THROWS_AS(cli::spec_from_json_text("{not json", base), ConfigError);
    CHECK_THROWS_AS(cli::spec_from_json_text(R"({"data": {"bogus": 1}})", base), ConfigError);
}
