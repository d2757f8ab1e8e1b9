#ifndef SEQMINE_METRICS_HPP
#define SEQMINE_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqmine/tensor.hpp"

namespace seqmine {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

    Index num_classes() const { return counts.rows(); }
    std::int64_t total() const { return counts.sum(); }
    std::int64_t correct() const { return counts.diagonal().sum(); }
};

ConfusionMatrix confusion(std::span<const Index> predictions, std::span<const Index> labels,
                          Index num_classes);

enum class Averaging { macro, micro, weighted };

Averaging averaging_from_string(const std::string& name);
std::string to_string(Averaging mode);

/// Accuracy plus precision/recall under the three averaging modes. The
/// primary (reported) numbers are the macro averages: per-class values
/// averaged unweighted, with never-predicted classes contributing
/// precision 0 and classes absent from the labels excluded from recall.
struct EvalReport {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double micro_precision = 0.0;
    double micro_recall = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    std::vector<bool> never_predicted;  // precision-0 convention engaged
    std::vector<bool> absent;           // class missing from labels
    std::int64_t sample_count = 0;

    double precision(Averaging mode) const;
    double recall(Averaging mode) const;
};

EvalReport report(const ConfusionMatrix& cm);

/// Table-style CSV: header "model,acc,precision,recall", percentages with
/// two decimals.
std::string report_csv(const EvalReport& r, const std::string& model_name, Averaging mode);

} // namespace seqmine

#endif
