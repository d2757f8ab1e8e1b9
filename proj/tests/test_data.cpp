#include <doctest.h>

#include <cmath>
#include <set>

#include "seqmine/data.hpp"

using namespace seqmine;

namespace {

const char* kFixture =
    "#synthetic fixture\n"
    "@problemName toy\n"
    "@timeStamps false\n"
    "@missing false\n"
    "@univariate false\n"
    "@dimensions 2\n"
    "@equalLength true\n"
    "@seriesLength 3\n"
    "@classLabel true a b\n"
    "@data\n"
    "1,2,3:4,5,6:a\n"
    "7,8,9:10,11,12:b\n";

} // namespace

TEST_CASE("parse_ts: two-line fixture") {
    const SequenceDataset ds = parse_ts_text(kFixture, "fixture");
    CHECK(ds.problem_name == "toy");
    CHECK(ds.channels == 2);
    CHECK(ds.class_names == std::vector<std::string>{"a", "b"});
    REQUIRE(ds.samples.size() == 2);
    const SequenceSample& s = ds.samples[0];
    CHECK(s.values.shape() == Shape{3, 2});
    CHECK(s.label == 0);
    // time-major rows: step t holds (channel1[t], channel2[t])
    CHECK(s.values.at(0, 0) == 1.0);
    CHECK(s.values.at(0, 1) == 4.0);
    CHECK(s.values.at(2, 1) == 6.0);
    CHECK(ds.samples[1].label == 1);
}

TEST_CASE("parse_ts: dimension count mismatch reports the line") {
    const std::string text =
        "@dimensions 2\n@classLabel true a\n@data\n1,2:3,4:5,6:a\n";
    try {
        parse_ts_text(text, "bad");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bad:4") != std::string::npos);
        CHECK(msg.find("3 dimensions") != std::string::npos);
    }
}

TEST_CASE("parse_ts: missing values are linearly interpolated") {
    const std::string text = "@classLabel true a\n@data\n1,?,3:a\n";
    const SequenceDataset ds = parse_ts_text(text, "x");
    CHECK(ds.samples[0].values.at(1, 0) == doctest::Approx(2.0).epsilon(1e-15));

    // held edges
    const SequenceDataset edge = parse_ts_text("@classLabel true a\n@data\n?,5,?,?:a\n", "x");
    CHECK(edge.samples[0].values.at(0, 0) == 5.0);
    CHECK(edge.samples[0].values.at(3, 0) == 5.0);

    CHECK_THROWS_AS(parse_ts_text("@classLabel true a\n@data\n?,?:a\n", "x"), ParseError);
}

TEST_CASE("parse_ts: unknown class label, unknown directive, empty body") {
    CHECK_THROWS_AS(parse_ts_text("@classLabel true a\n@data\n1,2:zzz\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_ts_text("@frobnicate yes\n@data\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_ts_text("@classLabel true a\n@data\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_ts_text("@classLabel true a\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_ts_text("@classLabel false\n@data\n1:a\n", "x"), ParseError);
    CHECK_THROWS_AS(parse_ts_text("@classLabel true a\n@data\n1,oops:a\n", "x"), ParseError);
}

TEST_CASE("parse_ts round-trips through serialize_ts") {
    const SequenceDataset ds = parse_ts_text(kFixture, "fixture");
    const std::string text = serialize_ts(ds);
    const SequenceDataset again = parse_ts_text(text, "roundtrip");
    REQUIRE(again.samples.size() == ds.samples.size());
    CHECK(again.class_names == ds.class_names);
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(again.samples[i].label == ds.samples[i].label);
        CHECK((again.samples[i].values.values() == ds.samples[i].values.values()).all());
    }
    // fractional values survive exactly via shortest round-trip formatting
    const std::string frac = "@classLabel true a\n@data\n0.1,0.30000000000000004,-1e-17:a\n";
    const SequenceDataset f1 = parse_ts_text(frac, "f");
    const SequenceDataset f2 = parse_ts_text(serialize_ts(f1), "f2");
    CHECK((f1.samples[0].values.values() == f2.samples[0].values.values()).all());
}

TEST_CASE("pad_or_trim spec examples") {
    SequenceSample s{Tensor({3, 1}, std::vector<double>{1, 2, 3}), 1};

    const SequenceSample padded = pad_or_trim(s, 5);
    CHECK(padded.values.shape() == Shape{5, 1});
    CHECK(padded.values.at(2, 0) == 3.0);
    CHECK(padded.values.at(3, 0) == 0.0);
    CHECK(padded.values.at(4, 0) == 0.0);
    CHECK(padded.label == 1);

    const SequenceSample trimmed = pad_or_trim(s, 2);
    CHECK(trimmed.values.shape() == Shape{2, 1});
    CHECK(trimmed.values.at(1, 0) == 2.0);

    const SequenceSample same = pad_or_trim(s, 3);
    CHECK((same.values.values() == s.values.values()).all());

    // idempotent composition
    const SequenceSample twice = pad_or_trim(pad_or_trim(s, 4), 4);
    CHECK((twice.values.values() == pad_or_trim(s, 4).values.values()).all());

    CHECK_THROWS_AS(pad_or_trim(s, 0), ValueError);
}

TEST_CASE("znorm statistics and transform") {
    SequenceDataset train;
    train.channels = 2;
    train.class_names = {"a"};
    // channel 0 takes values {0, 2}; channel 1 is constant 5
    train.samples.push_back({Tensor({2, 2}, std::vector<double>{0, 5, 2, 5}), 0});

    const ChannelStats stats = fit_channel_stats(train);
    CHECK(stats.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stats.stddev[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stats.stddev[1] == 0.0);

    const SequenceDataset normed = apply_znorm(train, stats);
    CHECK(normed.samples[0].values.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(normed.samples[0].values.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // constant channel collapses to zero through the std floor
    CHECK(normed.samples[0].values.at(0, 1) == 0.0);
    CHECK(normed.samples[0].values.at(1, 1) == 0.0);

    // applying the stored stats twice is not the identity
    const SequenceDataset twice = apply_znorm(normed, stats);
    CHECK(twice.samples[0].values.at(0, 0) != normed.samples[0].values.at(0, 0));

    // re-fit on the normalized split: means ~0, stds ~1 for varying channels
    const ChannelStats refit = fit_channel_stats(normed);
    CHECK(std::abs(refit.mean[0]) < 1e-9);
    CHECK(std::abs(refit.stddev[0] - 1.0) < 1e-9);
}

TEST_CASE("synth datasets are deterministic, balanced, and disjoint") {
    SynthSpec spec;
    spec.num_classes = 4;
    spec.samples_per_class = 6;
    spec.length = 20;
    spec.channels = 2;
    spec.motif_length = 5;
    spec.noise = 0.25;
    spec.seed = 7;

    const SynthDataset a = synth_motif_dataset(spec);
    const SynthDataset b = synth_motif_dataset(spec);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK((a.train.samples[i].values.values() == b.train.samples[i].values.values()).all());
        CHECK(a.train.samples[i].label == b.train.samples[i].label);
    }

    // 2:1 stratified split: 4 train + 2 test per class
    CHECK(a.train.size() == 16);
    CHECK(a.test.size() == 8);
    std::vector<int> train_counts(4, 0), test_counts(4, 0);
    for (const auto& s : a.train.samples) ++train_counts[static_cast<std::size_t>(s.label)];
    for (const auto& s : a.test.samples) ++test_counts[static_cast<std::size_t>(s.label)];
    for (int k = 0; k < 4; ++k) {
        CHECK(train_counts[static_cast<std::size_t>(k)] == 4);
        CHECK(test_counts[static_cast<std::size_t>(k)] == 2);
    }

    // split disjointness: no train sample equals a test sample
    for (const auto& tr : a.train.samples) {
        for (const auto& te : a.test.samples) {
            CHECK_FALSE((tr.values.values() == te.values.values()).all());
        }
    }

    SynthSpec pool;
    pool.num_classes = 4;
    pool.samples_per_class = 50;
    const SynthDataset big = synth_motif_dataset(pool);
    CHECK(big.train.size() + big.test.size() == 200);  // pool before the split
}

TEST_CASE("noise-free synthetic data is solved exactly by the motif matcher") {
    SynthSpec spec;
    spec.num_classes = 4;
    spec.samples_per_class = 9;
    spec.length = 30;
    spec.channels = 3;
    spec.motif_length = 8;
    spec.noise = 0.0;
    spec.seed = 11;

    const SynthDataset data = synth_motif_dataset(spec);
    for (const SequenceDataset* split : {&data.train, &data.test}) {
        for (const auto& sample : split->samples) {
            CHECK(nearest_motif_class(sample, data.motifs) == sample.label);
        }
    }
    CHECK_THROWS_AS(synth_motif_dataset([] {
                        SynthSpec bad;
                        bad.motif_length = 100;
                        bad.length = 10;
                        return bad;
                    }()),
                    ValueError);
}

TEST_CASE("batch_indices partitions the dataset with seeded shuffles") {
    std::mt19937_64 rng(3);
    const auto batches = batch_indices(10, 4, rng);
    REQUIRE(batches.size() == 3);
    CHECK(batches[0].size() == 4);
    CHECK(batches[1].size() == 4);
    CHECK(batches[2].size() == 2);

    std::set<std::size_t> seen;
    for (const auto& b : batches) seen.insert(b.begin(), b.end());
    CHECK(seen.size() == 10);  // exact partition

    std::mt19937_64 r1(5), r2(5);
    CHECK(batch_indices(10, 4, r1) == batch_indices(10, 4, r2));

    std::mt19937_64 r3(5);
    CHECK_THROWS_AS(batch_indices(0, 4, r3), ValueError);
    CHECK_THROWS_AS(batch_indices(10, 0, r3), ValueError);
}
