#include "seqmine/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace seqmine {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

bool parse_bool(const std::string& source, std::size_t line, const std::string& token) {
    const std::string t = lower(trim(token));
    if (t == "true") return true;
    if (t == "false") return false;
    fail(source, line, "expected true/false, got '" + token + "'");
}

double parse_number(const std::string& source, std::size_t line, const std::string& token) {
    const std::string t = trim(token);
    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        fail(source, line, "malformed number '" + token + "'");
    }
    if (!std::isfinite(value)) fail(source, line, "non-finite value '" + token + "'");
    return value;
}

long parse_int(const std::string& source, std::size_t line, const std::string& token) {
    const std::string t = trim(token);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        fail(source, line, "malformed integer '" + token + "'");
    }
    return value;
}

// Linear interpolation over missing entries (NaN), edges held at the
// nearest known value.
void impute_channel(const std::string& source, std::size_t line, std::vector<double>& series) {
    const std::size_t n = series.size();
    std::size_t known = 0;
    for (double v : series) known += std::isnan(v) ? 0u : 1u;
    if (known == 0) fail(source, line, "channel consists entirely of missing values");
    if (known == n) return;

    std::size_t prev = n;  // index of last known value seen
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isnan(series[i])) {
            prev = i;
            continue;
        }
        std::size_t next = i + 1;
        while (next < n && std::isnan(series[next])) ++next;
        if (prev == n) {
            series[i] = series[next];  // leading gap: hold the first known value
        } else if (next == n) {
            series[i] = series[prev];  // trailing gap: hold the last known value
        } else {
            const double lo = series[prev];
            const double hi = series[next];
            const double frac = static_cast<double>(i - prev) / static_cast<double>(next - prev);
            series[i] = lo + (hi - lo) * frac;
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

SequenceDataset parse_ts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    return parse_ts_text(buf.str(), path.filename().string());
}

SequenceDataset parse_ts_text(const std::string& text, const std::string& source_name) {
    SequenceDataset ds;
    bool in_body = false;
    bool saw_class_label = false;
    std::optional<Index> declared_dims;
    std::optional<bool> equal_length;
    std::optional<bool> univariate;
    std::optional<Index> series_length;

    std::istringstream lines(text);
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(lines, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (!in_body && line[0] == '@') {
            const std::size_t sp = line.find_first_of(" \t");
            const std::string name = lower(line.substr(1, sp == std::string::npos ? sp : sp - 1));
            const std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
            if (name == "problemname") {
                ds.problem_name = rest;
            } else if (name == "timestamps") {
                if (parse_bool(source_name, line_no, rest)) {
                    fail(source_name, line_no, "timestamped series are not supported");
                }
            } else if (name == "missing") {
                parse_bool(source_name, line_no, rest);
            } else if (name == "univariate") {
                univariate = parse_bool(source_name, line_no, rest);
            } else if (name == "dimensions") {
                declared_dims = static_cast<Index>(parse_int(source_name, line_no, rest));
                if (*declared_dims < 1) fail(source_name, line_no, "dimensions must be positive");
            } else if (name == "equallength") {
                equal_length = parse_bool(source_name, line_no, rest);
            } else if (name == "serieslength") {
                series_length = static_cast<Index>(parse_int(source_name, line_no, rest));
                if (*series_length < 1) fail(source_name, line_no, "seriesLength must be positive");
            } else if (name == "classlabel") {
                const std::vector<std::string> tokens = split(rest, ' ');
                if (tokens.empty() || !parse_bool(source_name, line_no, tokens.front())) {
                    fail(source_name, line_no, "class labels are required for classification data");
                }
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    const std::string t = trim(tokens[i]);
                    if (!t.empty()) ds.class_names.push_back(t);
                }
                if (ds.class_names.empty()) {
                    fail(source_name, line_no, "@classLabel true must list the class names");
                }
                saw_class_label = true;
            } else if (name == "data") {
                in_body = true;
            } else {
                fail(source_name, line_no, "unknown directive '@" + name + "'");
            }
            continue;
        }

        if (!in_body) fail(source_name, line_no, "sample data before @data directive");
        if (!saw_class_label) fail(source_name, line_no, "@classLabel missing before data");

        std::vector<std::string> groups = split(line, ':');
        if (groups.size() < 2) {
            fail(source_name, line_no, "expected ':'-separated channels and a class label");
        }
        const std::string label_token = trim(groups.back());
        groups.pop_back();

        const Index dims = declared_dims.value_or(static_cast<Index>(groups.size()));
        if (static_cast<Index>(groups.size()) != dims) {
            fail(source_name, line_no,
                 "sample has " + std::to_string(groups.size()) + " dimensions, expected " +
                     std::to_string(dims));
        }
        if (!declared_dims) declared_dims = dims;
        if (univariate && *univariate && dims != 1) {
            fail(source_name, line_no, "@univariate true but sample has multiple dimensions");
        }

        std::vector<std::vector<double>> channels(groups.size());
        std::optional<std::size_t> length;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const std::vector<std::string> tokens = split(groups[g], ',');
            auto& series = channels[g];
            series.reserve(tokens.size());
            for (const std::string& tok : tokens) {
                const std::string t = trim(tok);
                if (t == "?") {
                    series.push_back(std::numeric_limits<double>::quiet_NaN());
                } else {
                    series.push_back(parse_number(source_name, line_no, t));
                }
            }
            if (series.empty()) fail(source_name, line_no, "empty channel series");
            if (!length) {
                length = series.size();
            } else if (series.size() != *length) {
                fail(source_name, line_no, "channels of one sample differ in length");
            }
            impute_channel(source_name, line_no, series);
        }
        if (series_length && equal_length.value_or(true) &&
            static_cast<Index>(*length) != *series_length) {
            fail(source_name, line_no,
                 "sample length " + std::to_string(*length) + " does not match @seriesLength " +
                     std::to_string(*series_length));
        }

        const auto label_it =
            std::find(ds.class_names.begin(), ds.class_names.end(), label_token);
        if (label_it == ds.class_names.end()) {
            fail(source_name, line_no, "unknown class label '" + label_token + "'");
        }

        const Index steps = static_cast<Index>(*length);
        Array values(steps * dims);
        for (Index t = 0; t < steps; ++t) {
            for (Index ch = 0; ch < dims; ++ch) {
                values[t * dims + ch] = channels[static_cast<std::size_t>(ch)]
                                                [static_cast<std::size_t>(t)];
            }
        }
        SequenceSample sample;
        sample.values = Tensor({steps, dims}, std::move(values));
        sample.label = static_cast<Index>(label_it - ds.class_names.begin());
        ds.samples.push_back(std::move(sample));
    }

    if (!in_body) throw ParseError(source_name + ": no @data directive");
    if (ds.samples.empty()) throw ParseError(source_name + ": empty body, no samples after @data");
    ds.channels = *declared_dims;
    return ds;
}

std::string serialize_ts(const SequenceDataset& dataset) {
    if (dataset.samples.empty()) throw ValueError("cannot serialize an empty dataset");
    if (dataset.class_names.empty()) throw ValueError("dataset has no class names");

    bool equal = true;
    const Index first_len = dataset.samples.front().length();
    for (const auto& s : dataset.samples) equal = equal && s.length() == first_len;

    std::ostringstream os;
    os << "@problemName " << (dataset.problem_name.empty() ? "dataset" : dataset.problem_name)
       << "\n";
    os << "@timeStamps false\n";
    os << "@missing false\n";
    os << "@univariate " << (dataset.channels == 1 ? "true" : "false") << "\n";
    os << "@dimensions " << dataset.channels << "\n";
    os << "@equalLength " << (equal ? "true" : "false") << "\n";
    if (equal) os << "@seriesLength " << first_len << "\n";
    os << "@classLabel true";
    for (const auto& name : dataset.class_names) os << ' ' << name;
    os << "\n@data\n";

    for (const auto& s : dataset.samples) {
        const Index steps = s.length();
        const Index dims = s.channels();
        for (Index ch = 0; ch < dims; ++ch) {
            for (Index t = 0; t < steps; ++t) {
                if (t) os << ',';
                os << format_double(s.values.at(t, ch));
            }
            os << ':';
        }
        os << dataset.class_names[static_cast<std::size_t>(s.label)] << "\n";
    }
    return os.str();
}

SequenceSample pad_or_trim(const SequenceSample& sample, Index length) {
    if (length < 1) throw ValueError("pad_or_trim length must be >= 1");
    const Index steps = sample.length();
    const Index dims = sample.channels();
    if (steps == length) {
        return SequenceSample{sample.values.detach(), sample.label};
    }
    Array out = Array::Zero(length * dims);
    const Index keep = std::min(steps, length);
    out.head(keep * dims) = sample.values.values().head(keep * dims);
    return SequenceSample{Tensor({length, dims}, std::move(out)), sample.label};
}

SequenceDataset pad_or_trim(const SequenceDataset& dataset, Index length) {
    SequenceDataset out = dataset;
    out.samples.clear();
    out.samples.reserve(dataset.samples.size());
    for (const auto& s : dataset.samples) out.samples.push_back(pad_or_trim(s, length));
    return out;
}

ChannelStats fit_channel_stats(const SequenceDataset& train) {
    if (train.samples.empty()) throw ValueError("cannot fit statistics on an empty dataset");
    const Index dims = train.samples.front().channels();
    std::vector<double> sum(static_cast<std::size_t>(dims), 0.0);
    std::vector<std::int64_t> count(static_cast<std::size_t>(dims), 0);
    for (const auto& s : train.samples) {
        if (s.channels() != dims) throw ShapeError("dataset channels are inconsistent");
        for (Index t = 0; t < s.length(); ++t) {
            for (Index ch = 0; ch < dims; ++ch) {
                sum[static_cast<std::size_t>(ch)] += s.values.at(t, ch);
                ++count[static_cast<std::size_t>(ch)];
            }
        }
    }
    ChannelStats stats;
    stats.mean.resize(static_cast<std::size_t>(dims));
    stats.stddev.resize(static_cast<std::size_t>(dims));
    for (std::size_t ch = 0; ch < stats.mean.size(); ++ch) {
        stats.mean[ch] = sum[ch] / static_cast<double>(count[ch]);
    }
    std::vector<double> sq(static_cast<std::size_t>(dims), 0.0);
    for (const auto& s : train.samples) {
        for (Index t = 0; t < s.length(); ++t) {
            for (Index ch = 0; ch < dims; ++ch) {
                const double delta = s.values.at(t, ch) - stats.mean[static_cast<std::size_t>(ch)];
                sq[static_cast<std::size_t>(ch)] += delta * delta;
            }
        }
    }
    for (std::size_t ch = 0; ch < stats.stddev.size(); ++ch) {
        stats.stddev[ch] = std::sqrt(sq[ch] / static_cast<double>(count[ch]));
    }
    return stats;
}

SequenceDataset apply_znorm(const SequenceDataset& dataset, const ChannelStats& stats) {
    if (static_cast<std::size_t>(dataset.channels) != stats.mean.size()) {
        throw ShapeError("statistics cover " + std::to_string(stats.mean.size()) +
                         " channels, dataset has " + std::to_string(dataset.channels));
    }
    SequenceDataset out = dataset;
    for (auto& s : out.samples) {
        const Index steps = s.length();
        const Index dims = s.channels();
        Array values(steps * dims);
        for (Index t = 0; t < steps; ++t) {
            for (Index ch = 0; ch < dims; ++ch) {
                const auto c = static_cast<std::size_t>(ch);
                const double denom = std::max(stats.stddev[c], 1e-8);
                values[t * dims + ch] = (s.values.at(t, ch) - stats.mean[c]) / denom;
            }
        }
        s.values = Tensor({steps, dims}, std::move(values));
    }
    return out;
}

void SynthSpec::validate() const {
    if (num_classes < 2) throw ValueError("synthetic data needs at least 2 classes");
    if (samples_per_class < 2) throw ValueError("need at least 2 samples per class for the split");
    if (length < 1 || channels < 1) throw ValueError("length and channels must be positive");
    if (motif_length < 1 || motif_length > length) {
        throw ValueError("motif length must be in [1, length]");
    }
    if (noise < 0.0) throw ValueError("noise scale must be non-negative");
}

SynthDataset synth_motif_dataset(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Index m = spec.motif_length;
    const Index d = spec.channels;
    const Index steps = spec.length;

    // Fixed per-class motifs: one smooth bump per channel with a seeded
    // center, width, and signed amplitude.
    std::vector<Tensor> motifs;
    motifs.reserve(static_cast<std::size_t>(spec.num_classes));
    for (Index k = 0; k < spec.num_classes; ++k) {
        Array motif(m * d);
        for (Index ch = 0; ch < d; ++ch) {
            const double center = (0.25 + 0.5 * unit(rng)) * static_cast<double>(m - 1);
            const double width = std::max(0.5, (0.08 + 0.14 * unit(rng)) * static_cast<double>(m));
            const double magnitude = 0.8 + 0.8 * unit(rng);
            const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
            for (Index i = 0; i < m; ++i) {
                const double z = (static_cast<double>(i) - center) / width;
                motif[i * d + ch] = sign * magnitude * std::exp(-0.5 * z * z);
            }
        }
        motifs.push_back(Tensor({m, d}, std::move(motif)));
    }

    std::uniform_int_distribution<Index> position(0, steps - m);
    std::normal_distribution<double> gauss(0.0, spec.noise > 0.0 ? spec.noise : 1.0);

    SynthDataset out;
    for (SequenceDataset* split : {&out.train, &out.test}) {
        split->channels = d;
        split->problem_name = "synthetic-motifs";
        for (Index k = 0; k < spec.num_classes; ++k) {
            split->class_names.push_back("c" + std::to_string(k));
        }
    }
    out.train.split = "train";
    out.test.split = "test";

    const Index train_per_class = (2 * spec.samples_per_class) / 3;
    for (Index k = 0; k < spec.num_classes; ++k) {
        const Array& motif = motifs[static_cast<std::size_t>(k)].values();
        for (Index s = 0; s < spec.samples_per_class; ++s) {
            const Index pos = position(rng);
            Array values(steps * d);
            if (spec.noise > 0.0) {
                for (Index i = 0; i < values.size(); ++i) values[i] = gauss(rng);
            } else {
                values.setZero();
            }
            values.segment(pos * d, m * d) += motif;
            SequenceSample sample{Tensor({steps, d}, std::move(values)), k};
            if (s < train_per_class) {
                out.train.samples.push_back(std::move(sample));
            } else {
                out.test.samples.push_back(std::move(sample));
            }
        }
    }
    out.motifs = std::move(motifs);
    return out;
}

Index nearest_motif_class(const SequenceSample& sample, std::span<const Tensor> motifs) {
    if (motifs.empty()) throw ValueError("no motifs to match against");
    const Index steps = sample.length();
    const Index d = sample.channels();
    Index best_class = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < motifs.size(); ++k) {
        const Tensor& motif = motifs[k];
        if (motif.cols() != d) throw ShapeError("motif channels do not match the sample");
        const Index m = motif.rows();
        if (m > steps) throw BoundsError("sample shorter than the motif");
        double class_best = std::numeric_limits<double>::infinity();
        for (Index p = 0; p + m <= steps; ++p) {
            const double dist =
                (sample.values.values().segment(p * d, m * d) - motif.values()).square().sum();
            class_best = std::min(class_best, dist);
        }
        if (class_best < best) {
            best = class_best;
            best_class = static_cast<Index>(k);
        }
    }
    return best_class;
}

std::vector<std::vector<std::size_t>> batch_indices(std::size_t count, std::size_t batch_size,
                                                    std::mt19937_64& rng) {
    if (count == 0) throw ValueError("cannot batch an empty dataset");
    if (batch_size < 1) throw ValueError("batch size must be >= 1");
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < count; start += batch_size) {
        const std::size_t end = std::min(count, start + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

} // namespace seqmine
