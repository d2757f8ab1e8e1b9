#include <doctest.h>

#include <cmath>
#include <random>

#include "seqmine/attention.hpp"
#include "seqmine/gradcheck.hpp"
#include "seqmine/graph.hpp"
#include "seqmine/ops.hpp"

using namespace seqmine;

namespace {

HiddenSequence hidden_from(Shape shape, std::vector<double> values) {
    HiddenSequence hs;
    hs.values = Tensor(shape, values);
    hs.hidden_size = shape[1] / 2;
    return hs;
}

Array random_energies(Index steps, std::mt19937_64& rng, double lo = -4.0, double hi = 4.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Array e(steps);
    for (Index i = 0; i < steps; ++i) e[i] = dist(rng);
    return e;
}

// Raw-definition oracle: alpha_t = exp(e_t) / sum_{k in win(t)} exp(e_k).
Array windowed_oracle(const Array& e, Index w) {
    const Index steps = e.size();
    Array alpha(steps);
    for (Index t = 0; t < steps; ++t) {
        const Index lo = std::max<Index>(0, t - w);
        const Index hi = std::min<Index>(steps - 1, t + w);
        double denom = 0.0;
        for (Index k = lo; k <= hi; ++k) denom += std::exp(e[k]);
        alpha[t] = std::exp(e[t]) / denom;
    }
    return alpha;
}

} // namespace

TEST_CASE("energies: zero params give zero energies") {
    HiddenSequence hs = hidden_from({3, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    AttentionScaleParams scale{Tensor::zeros({1, 4}), Tensor::scalar(0.0), 1};
    Tensor e = energies(hs, scale);
    CHECK(e.shape() == Shape{3});
    CHECK(e.values().abs().maxCoeff() == 0.0);
}

TEST_CASE("energies: zero weight, large bias saturates toward 1") {
    HiddenSequence hs = hidden_from({2, 2}, {1, 2, 3, 4});
    AttentionScaleParams scale{Tensor::zeros({1, 2}), Tensor::scalar(10.0), 0};
    Tensor e = energies(hs, scale);
    for (Index t = 0; t < 2; ++t) {
        CHECK(e.at(t) == doctest::Approx(std::tanh(10.0)).epsilon(1e-15));
        CHECK(e.at(t) < 1.0);
    }
}

TEST_CASE("energies: cancellation gives tanh(0) = 0") {
    HiddenSequence hs = hidden_from({1, 2}, {1, -1});
    AttentionScaleParams scale{Tensor({1, 2}, std::vector<double>{0.5, 0.5}), Tensor::scalar(0.0),
                               0};
    CHECK(energies(hs, scale).at(0) == 0.0);
}

TEST_CASE("energies: width mismatch is a shape error") {
    HiddenSequence hs = hidden_from({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8});
    AttentionScaleParams scale{Tensor::zeros({1, 6}), Tensor::scalar(0.0), 1};
    CHECK_THROWS_AS(energies(hs, scale), ShapeError);
}

TEST_CASE("windowed_weights: clamped windows on flat energies") {
    Tensor e({3}, std::vector<double>{0, 0, 0});
    Tensor alpha = windowed_weights(e, 1);
    CHECK(alpha.at(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(alpha.at(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(alpha.at(2) == doctest::Approx(0.5).epsilon(1e-14));
    // locally normalized weights do not sum to 1 in general
    CHECK(alpha.values().sum() == doctest::Approx(4.0 / 3).epsilon(1e-14));
}

TEST_CASE("windowed_weights: w >= T-1 reduces to the global softmax") {
    std::mt19937_64 rng(31);
    const Array e = random_energies(6, rng);
    Tensor et({6}, e);
    const Array full = softmax_slice(et, 0, 5).values();
    for (Index w : {Index(5), Index(9)}) {
        const Array alpha = windowed_weights(et, w).values();
        CHECK((alpha - full).abs().maxCoeff() < 1e-12);
        CHECK(std::abs(alpha.sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("windowed_weights: w = 0 gives all ones") {
    std::mt19937_64 rng(32);
    Tensor e({5}, random_energies(5, rng));
    const Array alpha = windowed_weights(e, 0).values();
    CHECK((alpha - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("windowed_weights: per-window normalization identity on random inputs") {
    std::mt19937_64 rng(33);
    std::uniform_int_distribution<Index> len_dist(1, 12);
    for (int it = 0; it < 100; ++it) {
        const Index steps = len_dist(rng);
        std::uniform_int_distribution<Index> w_dist(0, steps + 1);
        const Index w = w_dist(rng);
        const Array e = random_energies(steps, rng);
        const Array alpha = windowed_weights(Tensor({steps}, e), w).values();
        for (Index t = 0; t < steps; ++t) {
            const Index lo = std::max<Index>(0, t - w);
            const Index hi = std::min<Index>(steps - 1, t + w);
            double denom = 0.0;
            for (Index k = lo; k <= hi; ++k) denom += std::exp(e[k]);
            CHECK(std::abs(alpha[t] * denom - std::exp(e[t])) < 1e-12);
            CHECK(alpha[t] > 0.0);
            CHECK(alpha[t] <= 1.0);
        }
        // raw-definition oracle agrees
        CHECK((alpha - windowed_oracle(e, w)).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("windowed_weights: shift invariance for every half width") {
    std::mt19937_64 rng(34);
    const Index steps = 8;
    const Array e = random_energies(steps, rng);
    for (Index w = 0; w <= steps; ++w) {
        const Array a1 = windowed_weights(Tensor({steps}, e), w).values();
        const Array a2 = windowed_weights(Tensor({steps}, Array(e + 7.5)), w).values();
        CHECK((a1 - a2).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("windowed_weights: increasing e_t strictly increases alpha_t") {
    std::mt19937_64 rng(35);
    const Index steps = 7;
    Array e = random_energies(steps, rng);
    const Index t = 3;
    const Index w = 2;
    const double before = windowed_weights(Tensor({steps}, e), w).values()[t];
    e[t] += 0.3;
    const double after = windowed_weights(Tensor({steps}, e), w).values()[t];
    CHECK(after > before);
}

TEST_CASE("scale_context: hand-computed weighted sum") {
    HiddenSequence hs = hidden_from({3, 2}, {1, 0, 0, 1, 1, 1});
    Tensor alpha({3}, std::vector<double>{0.5, 1.0 / 3, 0.5});
    Tensor c = scale_context(alpha, hs);
    CHECK(c.at(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.at(1) == doctest::Approx(5.0 / 6).epsilon(1e-14));
}

TEST_CASE("scale_context: one-hot selects a row, zeros give zeros") {
    HiddenSequence hs = hidden_from({3, 2}, {1, 2, 3, 4, 5, 6});
    Tensor onehot({3}, std::vector<double>{0, 1, 0});
    Tensor c = scale_context(onehot, hs);
    CHECK(c.at(0) == 3.0);
    CHECK(c.at(1) == 4.0);

    HiddenSequence zeros = hidden_from({3, 2}, {0, 0, 0, 0, 0, 0});
    CHECK(scale_context(onehot, zeros).values().abs().maxCoeff() == 0.0);

    Tensor bad({2}, std::vector<double>{1, 0});
    CHECK_THROWS_AS(scale_context(bad, hs), ShapeError);
}

TEST_CASE("multi_scale_context: S=1 with global window equals classic attention") {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Array hv(4 * 6);
    for (Index i = 0; i < hv.size(); ++i) hv[i] = dist(rng);
    HiddenSequence hs;
    hs.values = Tensor({4, 6}, hv);
    hs.hidden_size = 3;

    MultiScaleParams params;
    params.scales.push_back(AttentionScaleParams::init(6, 5, rng));  // w >= T-1

    auto [context, trace] = multi_scale_context(hs, params);
    // classic attention: softmax energies over the whole sequence
    Tensor e = energies(hs, params.scales[0]);
    Tensor w = softmax_slice(e, 0, 3);
    Tensor expect = scale_context(w, hs);
    CHECK((context.fused.values() - expect.values()).abs().maxCoeff() < 1e-12);
    CHECK(context.fused.shape() == Shape{6});
}

TEST_CASE("multi_scale_context: duplicated scale params duplicate the context block") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Array hv(5 * 4);
    for (Index i = 0; i < hv.size(); ++i) hv[i] = dist(rng);
    HiddenSequence hs;
    hs.values = Tensor({5, 4}, hv);
    hs.hidden_size = 2;

    AttentionScaleParams scale = AttentionScaleParams::init(4, 1, rng);
    MultiScaleParams params;
    params.scales = {scale, scale};

    auto [context, trace] = multi_scale_context(hs, params);
    CHECK(context.fused.shape() == Shape{8});
    REQUIRE(context.per_scale.size() == 2);
    CHECK((context.per_scale[0].values() == context.per_scale[1].values()).all());
    // fused is the exact in-order concatenation
    for (Index i = 0; i < 4; ++i) {
        CHECK(context.fused.at(i) == context.per_scale[0].at(i));
        CHECK(context.fused.at(4 + i) == context.per_scale[1].at(i));
    }
    CHECK(trace.scales.size() == 2);
    CHECK(trace.scales[0].weights == trace.scales[1].weights);
}

TEST_CASE("multi_scale_context: gradients of fused context match finite differences") {
    std::mt19937_64 rng(38);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Array hv(6 * 4);
    for (Index i = 0; i < hv.size(); ++i) hv[i] = dist(rng);
    Tensor hidden({6, 4}, hv, true);

    MultiScaleParams params = MultiScaleParams::init(4, {3, 7}, rng);
    Array probe_v(8);
    for (Index i = 0; i < 8; ++i) probe_v[i] = dist(rng);
    Tensor probe({8}, probe_v);

    auto loss = [&]() {
        HiddenSequence hs;
        hs.values = hidden;
        hs.hidden_size = 2;
        auto [context, trace] = multi_scale_context(hs, params);
        return sum(mul(context.fused, probe));
    };
    const GradCheckReport report = compare_gradients(
        loss,
        {{"w0", params.scales[0].weight}, {"b0", params.scales[0].bias},
         {"w1", params.scales[1].weight}, {"b1", params.scales[1].bias}, {"H", hidden}},
        1e-5);
    CHECK_MESSAGE(report.passed(1e-4), report.worst);
}

TEST_CASE("multi scale params validate window shapes") {
    std::mt19937_64 rng(39);
    CHECK_THROWS_AS(MultiScaleParams::init(4, {4}, rng), ValueError);   // even
    CHECK_THROWS_AS(MultiScaleParams::init(4, {}, rng), ValueError);    // empty
    CHECK_NOTHROW(MultiScaleParams::init(4, {1, 3, 11}, rng));
}
