#include "seqmine/metrics.hpp"

#include <cstdio>

namespace seqmine {

ConfusionMatrix confusion(std::span<const Index> predictions, std::span<const Index> labels,
                          Index num_classes) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    if (num_classes < 1) throw ValueError("confusion needs at least one class");
    ConfusionMatrix cm;
    cm.counts.setZero(num_classes, num_classes);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const Index p = predictions[i];
        const Index t = labels[i];
        if (p < 0 || p >= num_classes || t < 0 || t >= num_classes) {
            throw BoundsError("class index out of range at position " + std::to_string(i));
        }
        ++cm.counts(t, p);
    }
    return cm;
}

Averaging averaging_from_string(const std::string& name) {
    if (name == "macro") return Averaging::macro;
    if (name == "micro") return Averaging::micro;
    if (name == "weighted") return Averaging::weighted;
    throw ConfigError("unknown averaging mode '" + name + "' (macro|micro|weighted)");
}

std::string to_string(Averaging mode) {
    switch (mode) {
        case Averaging::macro: return "macro";
        case Averaging::micro: return "micro";
        case Averaging::weighted: return "weighted";
    }
    return "macro";
}

double EvalReport::precision(Averaging mode) const {
    switch (mode) {
        case Averaging::macro: return macro_precision;
        case Averaging::micro: return micro_precision;
        case Averaging::weighted: return weighted_precision;
    }
    return macro_precision;
}

double EvalReport::recall(Averaging mode) const {
    switch (mode) {
        case Averaging::macro: return macro_recall;
        case Averaging::micro: return micro_recall;
        case Averaging::weighted: return weighted_recall;
    }
    return macro_recall;
}

EvalReport report(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total <= 0) throw ValueError("cannot report on zero samples");
    const Index c = cm.num_classes();

    EvalReport r;
    r.sample_count = total;
    r.accuracy = static_cast<double>(cm.correct()) / static_cast<double>(total);
    r.per_class_precision.resize(static_cast<std::size_t>(c), 0.0);
    r.per_class_recall.resize(static_cast<std::size_t>(c), 0.0);
    r.never_predicted.resize(static_cast<std::size_t>(c), false);
    r.absent.resize(static_cast<std::size_t>(c), false);

    double prec_sum = 0.0;
    double recall_sum = 0.0;
    double weighted_prec = 0.0;
    double weighted_recall = 0.0;
    Index classes_with_support = 0;
    for (Index k = 0; k < c; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const std::int64_t col = cm.counts.col(k).sum();
        const std::int64_t row = cm.counts.row(k).sum();
        const std::int64_t tp = cm.counts(k, k);

        // Never-predicted classes take precision 0 (pessimistic convention).
        const double precision = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
        r.per_class_precision[ks] = precision;
        r.never_predicted[ks] = col == 0;
        prec_sum += precision;

        if (row > 0) {
            const double recall = static_cast<double>(tp) / static_cast<double>(row);
            r.per_class_recall[ks] = recall;
            recall_sum += recall;
            ++classes_with_support;
            const double weight = static_cast<double>(row) / static_cast<double>(total);
            weighted_prec += weight * precision;
            weighted_recall += weight * recall;
        } else {
            r.absent[ks] = true;
        }
    }
    r.macro_precision = prec_sum / static_cast<double>(c);
    r.macro_recall =
        classes_with_support > 0 ? recall_sum / static_cast<double>(classes_with_support) : 0.0;
    // Single-label multi-class: micro precision and recall both reduce to
    // trace / total.
    r.micro_precision = r.accuracy;
    r.micro_recall = r.accuracy;
    r.weighted_precision = weighted_prec;
    r.weighted_recall = weighted_recall;
    return r;
}

std::string report_csv(const EvalReport& r, const std::string& model_name, Averaging mode) {
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.2f,%.2f,%.2f\n", model_name.c_str(),
                  100.0 * r.accuracy, 100.0 * r.precision(mode), 100.0 * r.recall(mode));
    return std::string("model,acc,precision,recall\n") + line;
}

} // namespace seqmine
