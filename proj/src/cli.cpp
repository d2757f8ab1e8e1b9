#include "seqmine/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqmine/attention.hpp"
#include "seqmine/model.hpp"

namespace seqmine::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
    return buf;
}

json report_json(const EvalReport& r, const ConfusionMatrix* cm,
                 const std::vector<std::string>& class_names) {
    json out{{"accuracy", r.accuracy},
             {"macro_precision", r.macro_precision},
             {"macro_recall", r.macro_recall},
             {"micro_precision", r.micro_precision},
             {"micro_recall", r.micro_recall},
             {"weighted_precision", r.weighted_precision},
             {"weighted_recall", r.weighted_recall},
             {"per_class_precision", r.per_class_precision},
             {"per_class_recall", r.per_class_recall},
             {"never_predicted", r.never_predicted},
             {"absent_from_labels", r.absent},
             {"sample_count", r.sample_count},
             {"averaging_note", "primary numbers are macro averages"}};
    if (!class_names.empty()) out["class_names"] = class_names;
    if (cm) {
        json rows = json::array();
        for (Index t = 0; t < cm->num_classes(); ++t) {
            json row = json::array();
            for (Index p = 0; p < cm->num_classes(); ++p) row.push_back(cm->counts(t, p));
            rows.push_back(std::move(row));
        }
        out["confusion"] = std::move(rows);
    }
    return out;
}

struct EvalOutcome {
    EvalReport report;
    ConfusionMatrix cm;
};

EvalOutcome evaluate(const SequenceDataset& data, const ModelParams& params) {
    std::vector<Index> preds;
    std::vector<Index> labels;
    preds.reserve(data.size());
    labels.reserve(data.size());
    for (const auto& sample : data.samples) {
        preds.push_back(forward(sample.values, params).predicted_class);
        labels.push_back(sample.label);
    }
    EvalOutcome out;
    out.cm = confusion(preds, labels, params.config.num_classes);
    out.report = report(out.cm);
    return out;
}

struct PreparedData {
    SequenceDataset train;
    std::optional<SequenceDataset> test;
    std::optional<ChannelStats> stats;
};

/// Loads the raw splits from files or the synthetic generator.
std::pair<SequenceDataset, std::optional<SequenceDataset>> load_raw_data(const RunSpec& spec) {
    if (spec.data_train) {
        SequenceDataset train = parse_ts(*spec.data_train);
        train.split = "train";
        std::optional<SequenceDataset> test;
        if (spec.data_test) {
            test = parse_ts(*spec.data_test);
            test->split = "test";
            if (test->class_names != train.class_names) {
                throw ConfigError("train and test files declare different class labels");
            }
            if (test->channels != train.channels) {
                throw ConfigError("train and test files declare different channel counts");
            }
        }
        return {std::move(train), std::move(test)};
    }
    if (spec.synth) {
        SynthDataset synth = synth_motif_dataset(*spec.synth);
        return {std::move(synth.train), std::move(synth.test)};
    }
    throw ConfigError("no training data: give --data-train or a synth block in the config");
}

/// pad/trim first, then z-normalization fitted on the train split only.
PreparedData prepare_data(const RunSpec& spec, std::optional<Index> pad_length) {
    auto [train, test] = load_raw_data(spec);
    PreparedData out;
    out.train = std::move(train);
    out.test = std::move(test);
    if (pad_length) {
        out.train = pad_or_trim(out.train, *pad_length);
        if (out.test) *out.test = pad_or_trim(*out.test, *pad_length);
    }
    if (spec.znorm) {
        out.stats = fit_channel_stats(out.train);
        out.train = apply_znorm(out.train, *out.stats);
        if (out.test) *out.test = apply_znorm(*out.test, *out.stats);
    }
    return out;
}

/// Replays the preprocessing recorded in a checkpoint onto a new split.
SequenceDataset replay_preprocess(const Checkpoint& ck, SequenceDataset data) {
    if (ck.pad_length) data = pad_or_trim(data, *ck.pad_length);
    if (ck.znorm_stats) data = apply_znorm(data, *ck.znorm_stats);
    return data;
}

TrainConfig config_for_seed(const RunSpec& spec, std::uint64_t seed) {
    TrainConfig c = spec.train;
    c.seed = seed;
    return c;
}

/// Trains a fresh model on prepared data and returns the result plus the
/// checkpoint-ready state.
TrainResult train_fresh(const RunSpec& spec, PreparedData& data, std::uint64_t seed,
                        const std::vector<Index>& windows, std::optional<Index> pad_length) {
    if (data.train.num_classes() < 2) {
        throw ConfigError("training data must declare at least 2 classes");
    }
    ModelConfig config;
    config.input_size = data.train.channels;
    config.hidden_size = spec.hidden_size;
    config.num_classes = data.train.num_classes();
    config.window_lengths = windows;
    Checkpoint start = Checkpoint::fresh(ModelParams::init(config, seed));
    start.class_names = data.train.class_names;
    start.pad_length = pad_length;
    start.znorm_stats = data.stats;
    const SequenceDataset* eval_set = data.test ? &*data.test : nullptr;
    return train(std::move(start), data.train, eval_set, config_for_seed(spec, seed));
}

} // namespace

RunSpec spec_from_json_text(const std::string& text, const RunSpec& base) {
    RunSpec spec = base;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(
        j, {"seed", "out", "data", "synth", "model", "train", "sweep", "averaging", "model_name"},
        "config");
    try {
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) spec.out = j["out"].get<std::string>();
        if (j.contains("averaging")) {
            spec.averaging = averaging_from_string(j["averaging"].get<std::string>());
        }
        if (j.contains("model_name")) spec.model_name = j["model_name"].get<std::string>();
        if (j.contains("data")) {
            const json& d = j["data"];
            reject_unknown_keys(d, {"train", "test", "length", "znorm"}, "data");
            if (d.contains("train")) spec.data_train = d["train"].get<std::string>();
            if (d.contains("test")) spec.data_test = d["test"].get<std::string>();
            if (d.contains("length")) spec.pad_length = d["length"].get<Index>();
            if (d.contains("znorm")) spec.znorm = d["znorm"].get<bool>();
        }
        if (j.contains("synth")) {
            const json& s = j["synth"];
            reject_unknown_keys(s,
                                {"classes", "samples_per_class", "length", "channels",
                                 "motif_length", "noise", "seed"},
                                "synth");
            SynthSpec synth;
            synth.seed = spec.seed;
            if (s.contains("classes")) synth.num_classes = s["classes"].get<Index>();
            if (s.contains("samples_per_class")) {
                synth.samples_per_class = s["samples_per_class"].get<Index>();
            }
            if (s.contains("length")) synth.length = s["length"].get<Index>();
            if (s.contains("channels")) synth.channels = s["channels"].get<Index>();
            if (s.contains("motif_length")) synth.motif_length = s["motif_length"].get<Index>();
            if (s.contains("noise")) synth.noise = s["noise"].get<double>();
            if (s.contains("seed")) synth.seed = s["seed"].get<std::uint64_t>();
            spec.synth = synth;
        }
        if (j.contains("model")) {
            const json& m = j["model"];
            reject_unknown_keys(m, {"hidden", "windows"}, "model");
            if (m.contains("hidden")) spec.hidden_size = m["hidden"].get<Index>();
            if (m.contains("windows")) {
                spec.window_lengths = m["windows"].get<std::vector<Index>>();
            }
        }
        if (j.contains("train")) {
            const json& t = j["train"];
            reject_unknown_keys(t,
                                {"lr", "beta1", "beta2", "eps", "batch", "epochs", "patience",
                                 "clip", "eval_stopping"},
                                "train");
            if (t.contains("lr")) spec.train.learning_rate = t["lr"].get<double>();
            if (t.contains("beta1")) spec.train.beta1 = t["beta1"].get<double>();
            if (t.contains("beta2")) spec.train.beta2 = t["beta2"].get<double>();
            if (t.contains("eps")) spec.train.epsilon = t["eps"].get<double>();
            if (t.contains("batch")) spec.train.batch_size = t["batch"].get<Index>();
            if (t.contains("epochs")) spec.train.max_epochs = t["epochs"].get<Index>();
            if (t.contains("patience")) spec.train.patience = t["patience"].get<Index>();
            if (t.contains("clip") && !t["clip"].is_null()) {
                spec.train.clip_norm = t["clip"].get<double>();
            }
            if (t.contains("eval_stopping")) {
                spec.train.eval_stopping = t["eval_stopping"].get<bool>();
            }
        }
        if (j.contains("sweep")) {
            const json& s = j["sweep"];
            reject_unknown_keys(s, {"lengths", "windows"}, "sweep");
            if (s.contains("lengths")) spec.sweep_lengths = s["lengths"].get<std::vector<Index>>();
            if (s.contains("windows")) spec.sweep_windows = s["windows"].get<std::vector<Index>>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    return spec;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failure on " + tmp.string());
    }
    fs::rename(tmp, path);
}

int cmd_synth(const RunSpec& spec) {
    if (!spec.synth) throw ConfigError("synth command needs a synth block or flags");
    const SynthDataset data = synth_motif_dataset(*spec.synth);
    write_file_atomic(spec.out / "train.ts", serialize_ts(data.train));
    write_file_atomic(spec.out / "test.ts", serialize_ts(data.test));
    return exit_code::ok;
}

int cmd_train(const RunSpec& spec) {
    PreparedData data = prepare_data(spec, spec.pad_length);
    TrainResult result =
        train_fresh(spec, data, spec.seed, spec.window_lengths, spec.pad_length);

    save_checkpoint(spec.out / "checkpoint.bin", result.state);
    write_file_atomic(spec.out / "history.csv", result.history.csv());
    write_file_atomic(spec.out / "history.json",
                      result.history.json(/*include_wall_seconds=*/false));

    if (data.test) {
        const EvalOutcome ev = evaluate(*data.test, result.state.params);
        write_file_atomic(spec.out / "eval.json",
                          report_json(ev.report, &ev.cm, result.state.class_names).dump(2) + "\n");
        write_file_atomic(spec.out / "eval.csv",
                          report_csv(ev.report, spec.model_name, spec.averaging));
    }
    if (result.status == TrainStatus::diverged) {
        std::cerr << "training diverged: " << result.note << "\n";
        return exit_code::diverged;
    }
    return exit_code::ok;
}

int cmd_eval(const RunSpec& spec) {
    if (spec.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
    if (!spec.data_test) throw ConfigError("eval needs --data-test");
    const Checkpoint ck = load_checkpoint(spec.checkpoint);
    SequenceDataset data = replay_preprocess(ck, parse_ts(*spec.data_test));
    const EvalOutcome ev = evaluate(data, ck.params);
    write_file_atomic(spec.out / "eval.json",
                      report_json(ev.report, &ev.cm, ck.class_names).dump(2) + "\n");
    write_file_atomic(spec.out / "eval.csv",
                      report_csv(ev.report, spec.model_name, spec.averaging));
    return exit_code::ok;
}

std::string sweep_csv(const std::vector<Index>& points, const std::string& point_column,
                      std::uint64_t seed, const SweepRunner& runner) {
    std::ostringstream os;
    os << point_column << ",acc,precision,recall,status\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Index point = points[i];
        const std::uint64_t point_seed = seed ^ static_cast<std::uint64_t>(i);
        os << point << ',';
        try {
            const EvalReport r = runner(point, point_seed);
            os << percent(r.accuracy) << ',' << percent(r.macro_precision) << ','
               << percent(r.macro_recall) << ",ok\n";
        } catch (const Error& e) {
            std::string msg = e.what();
            for (char& c : msg) {
                if (c == ',' || c == '\n') c = ';';
            }
            os << ",,,failed: " << msg << "\n";
        }
    }
    return os.str();
}

int cmd_sweep_length(const RunSpec& spec) {
    if (spec.sweep_lengths.empty()) throw ConfigError("sweep-length needs a non-empty grid");
    for (Index len : spec.sweep_lengths) {
        if (len < 1) throw ConfigError("sweep lengths must be >= 1");
    }
    const SweepRunner runner = [&spec](Index length, std::uint64_t point_seed) {
        RunSpec point_spec = spec;
        point_spec.seed = point_seed;
        point_spec.train.seed = point_seed;
        PreparedData data = prepare_data(point_spec, length);
        if (!data.test) throw ConfigError("sweeps need a test split");
        TrainResult result =
            train_fresh(point_spec, data, point_seed, point_spec.window_lengths, length);
        if (result.status == TrainStatus::diverged) {
            throw ValueError("training diverged: " + result.note);
        }
        return evaluate(*data.test, result.state.params).report;
    };
    write_file_atomic(spec.out / "sweep_length.csv",
                      sweep_csv(spec.sweep_lengths, "length", spec.seed, runner));
    return exit_code::ok;
}

int cmd_sweep_window(const RunSpec& spec) {
    if (spec.sweep_windows.empty()) throw ConfigError("sweep-window needs a non-empty grid");
    for (Index w : spec.sweep_windows) {
        if (w < 1 || w % 2 == 0) {
            throw ConfigError("window lengths must be odd and >= 1, got " + std::to_string(w));
        }
    }
    const SweepRunner runner = [&spec](Index window, std::uint64_t point_seed) {
        RunSpec point_spec = spec;
        point_spec.seed = point_seed;
        point_spec.train.seed = point_seed;
        PreparedData data = prepare_data(point_spec, spec.pad_length);
        if (!data.test) throw ConfigError("sweeps need a test split");
        TrainResult result =
            train_fresh(point_spec, data, point_seed, {window}, spec.pad_length);
        if (result.status == TrainStatus::diverged) {
            throw ValueError("training diverged: " + result.note);
        }
        return evaluate(*data.test, result.state.params).report;
    };
    write_file_atomic(spec.out / "sweep_window.csv",
                      sweep_csv(spec.sweep_windows, "window", spec.seed, runner));
    return exit_code::ok;
}

int cmd_inspect_attention(const RunSpec& spec) {
    if (spec.checkpoint.empty()) throw ConfigError("inspect-attention needs --checkpoint");
    if (!spec.data_test) throw ConfigError("inspect-attention needs --data-test");
    const Checkpoint ck = load_checkpoint(spec.checkpoint);
    SequenceDataset data = replay_preprocess(ck, parse_ts(*spec.data_test));
    if (spec.sample_index < 0 || spec.sample_index >= static_cast<Index>(data.size())) {
        throw BoundsError("sample index " + std::to_string(spec.sample_index) +
                          " out of range for " + std::to_string(data.size()) + " samples");
    }
    const SequenceSample& sample = data.samples[static_cast<std::size_t>(spec.sample_index)];
    const Prediction pred = forward(sample.values, ck.params);

    json scales = json::array();
    for (std::size_t s = 0; s < pred.trace.scales.size(); ++s) {
        const ScaleTrace& st = pred.trace.scales[s];
        scales.push_back(json{{"window_length", 2 * st.half_width + 1},
                              {"half_width", st.half_width},
                              {"energies", st.energies},
                              {"weights", st.weights}});
    }
    std::vector<double> probs(pred.probs.values().data(),
                              pred.probs.values().data() + pred.probs.size());
    json out{{"sample_index", spec.sample_index},
             {"label", sample.label},
             {"predicted_class", pred.predicted_class},
             {"probs", probs},
             {"scales", std::move(scales)}};
    if (!ck.class_names.empty()) {
        out["label_name"] = ck.class_names.at(static_cast<std::size_t>(sample.label));
        out["predicted_name"] =
            ck.class_names.at(static_cast<std::size_t>(pred.predicted_class));
    }
    write_file_atomic(spec.out / "attention_trace.json", out.dump(2) + "\n");
    return exit_code::ok;
}

namespace {

struct Flags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> data_train;
    std::optional<std::string> data_test;
    std::optional<Index> pad_length;
    bool no_znorm = false;
    std::optional<Index> hidden;
    std::vector<Index> windows;
    std::optional<double> lr;
    std::optional<Index> batch;
    std::optional<Index> epochs;
    std::optional<Index> patience;
    std::optional<double> clip;
    bool eval_stopping = false;
    std::optional<std::string> averaging;
    std::vector<Index> sweep_points;
    std::optional<std::string> checkpoint;
    std::optional<Index> sample_index;
    // synth
    std::optional<Index> classes;
    std::optional<Index> per_class;
    std::optional<Index> channels;
    std::optional<Index> motif_length;
    std::optional<double> noise;
};

RunSpec resolve_spec(const Flags& f, bool synth_command) {
    RunSpec spec;
    if (f.config) {
        std::ifstream in(*f.config, std::ios::binary);
        if (!in) throw IoError("cannot open config " + *f.config);
        std::ostringstream buf;
        buf << in.rdbuf();
        spec = spec_from_json_text(buf.str(), spec);
    }
    if (f.seed) spec.seed = *f.seed;
    if (f.out) spec.out = *f.out;
    if (f.data_train) spec.data_train = *f.data_train;
    if (f.data_test) spec.data_test = *f.data_test;
    if (f.pad_length) spec.pad_length = *f.pad_length;
    if (f.no_znorm) spec.znorm = false;
    if (f.hidden) spec.hidden_size = *f.hidden;
    if (!f.windows.empty()) spec.window_lengths = f.windows;
    if (f.lr) spec.train.learning_rate = *f.lr;
    if (f.batch) spec.train.batch_size = *f.batch;
    if (f.epochs) spec.train.max_epochs = *f.epochs;
    if (f.patience) spec.train.patience = *f.patience;
    if (f.clip) spec.train.clip_norm = *f.clip;
    if (f.eval_stopping) spec.train.eval_stopping = true;
    if (f.averaging) spec.averaging = averaging_from_string(*f.averaging);
    if (f.checkpoint) spec.checkpoint = *f.checkpoint;
    if (f.sample_index) spec.sample_index = *f.sample_index;
    spec.train.seed = spec.seed;

    const bool synth_flags = f.classes || f.per_class || f.channels || f.motif_length || f.noise;
    if (synth_flags || (synth_command && !spec.synth)) {
        SynthSpec synth = spec.synth.value_or(SynthSpec{});
        if (!spec.synth) synth.seed = spec.seed;
        if (f.classes) synth.num_classes = *f.classes;
        if (f.per_class) synth.samples_per_class = *f.per_class;
        if (f.pad_length && synth_command) synth.length = *f.pad_length;
        if (f.channels) synth.channels = *f.channels;
        if (f.motif_length) synth.motif_length = *f.motif_length;
        if (f.noise) synth.noise = *f.noise;
        if (f.seed) synth.seed = *f.seed;
        spec.synth = synth;
    }
    return spec;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"sequence classifier: BiLSTM encoder with multi-scale windowed attention"};
    app.require_subcommand(1);

    Flags f;
    std::string command;

    auto add_common = [&f](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON run-spec file; flags override it");
        sub->add_option("--seed", f.seed, "master seed");
        sub->add_option("--out", f.out, "output directory");
    };
    auto add_data = [&f](CLI::App* sub) {
        sub->add_option("--data-train", f.data_train, "training split (.ts)");
        sub->add_option("--data-test", f.data_test, "test split (.ts)");
        sub->add_option("--length", f.pad_length, "pad or trim sequences to this length");
        sub->add_flag("--no-znorm", f.no_znorm, "disable per-channel z-normalization");
    };
    auto add_model = [&f](CLI::App* sub) {
        sub->add_option("--hidden", f.hidden, "LSTM hidden size per direction");
        sub->add_option("--windows", f.windows, "attention window lengths (odd)")
            ->delimiter(',');
    };
    auto add_train = [&f](CLI::App* sub) {
        sub->add_option("--lr", f.lr, "Adam learning rate");
        sub->add_option("--batch", f.batch, "batch size");
        sub->add_option("--epochs", f.epochs, "max epochs");
        sub->add_option("--patience", f.patience, "early-stop patience in epochs");
        sub->add_option("--clip", f.clip, "global gradient-norm clip");
        sub->add_flag("--eval-stopping", f.eval_stopping, "early-stop on eval loss");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic motif dataset");
    add_common(synth);
    synth->add_option("--classes", f.classes, "number of classes");
    synth->add_option("--per-class", f.per_class, "pool size per class before the 2:1 split");
    synth->add_option("--length", f.pad_length, "sequence length");
    synth->add_option("--channels", f.channels, "channel count");
    synth->add_option("--motif-length", f.motif_length, "motif length");
    synth->add_option("--noise", f.noise, "Gaussian noise scale");

    CLI::App* train_cmd = app.add_subcommand("train", "train a model and write artifacts");
    add_common(train_cmd);
    add_data(train_cmd);
    add_model(train_cmd);
    add_train(train_cmd);
    train_cmd->add_option("--averaging", f.averaging, "macro|micro|weighted for CSV reports");

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test split");
    add_common(eval_cmd);
    eval_cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file")->required();
    eval_cmd->add_option("--data-test", f.data_test, "test split (.ts)")->required();
    eval_cmd->add_option("--averaging", f.averaging, "macro|micro|weighted for CSV reports");

    CLI::App* sweep_len = app.add_subcommand("sweep-length", "train/evaluate per sequence length");
    add_common(sweep_len);
    add_data(sweep_len);
    add_model(sweep_len);
    add_train(sweep_len);
    sweep_len->add_option("--lengths", f.sweep_points, "length grid")->delimiter(',');

    CLI::App* sweep_win = app.add_subcommand("sweep-window", "train/evaluate per window length");
    add_common(sweep_win);
    add_data(sweep_win);
    add_model(sweep_win);
    add_train(sweep_win);
    sweep_win->add_option("--window-grid", f.sweep_points, "window length grid (odd values)")
        ->delimiter(',');

    CLI::App* inspect = app.add_subcommand("inspect-attention", "dump one sample's attention");
    add_common(inspect);
    inspect->add_option("--checkpoint", f.checkpoint, "checkpoint file")->required();
    inspect->add_option("--data-test", f.data_test, "test split (.ts)")->required();
    inspect->add_option("--sample", f.sample_index, "sample index in the test split");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::validation;
    }

    try {
        RunSpec spec = resolve_spec(f, app.got_subcommand(synth));
        if (app.got_subcommand(synth)) return cmd_synth(spec);
        if (app.got_subcommand(train_cmd)) return cmd_train(spec);
        if (app.got_subcommand(eval_cmd)) return cmd_eval(spec);
        if (app.got_subcommand(sweep_len)) {
            if (!f.sweep_points.empty()) spec.sweep_lengths = f.sweep_points;
            return cmd_sweep_length(spec);
        }
        if (app.got_subcommand(sweep_win)) {
            if (!f.sweep_points.empty()) spec.sweep_windows = f.sweep_points;
            return cmd_sweep_window(spec);
        }
        if (app.got_subcommand(inspect)) return cmd_inspect_attention(spec);
        throw ConfigError("no command selected");
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::io;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const BoundsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::internal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_code::internal;
    }
}

} // namespace seqmine::cli
