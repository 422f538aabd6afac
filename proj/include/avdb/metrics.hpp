#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avdb/dataset.hpp"

namespace avdb {

/// Counts with Drone as the positive class.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
};

/// Accuracy, sensitivity, precision; a zero denominator leaves the metric
/// unset rather than producing NaN.
struct MetricReport {
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> precision;
    std::vector<std::string> misclassified_ids;
};

ConfusionMatrix confusion(const std::vector<Label>& preds,
                          const std::vector<Label>& truth);

MetricReport report(const ConfusionMatrix& cm);

/// Ids whose prediction disagrees with the truth, in input order.
std::vector<std::string> misclassified_ids(const std::vector<std::string>& ids,
                                           const std::vector<Label>& preds,
                                           const std::vector<Label>& truth);

}  // namespace avdb
