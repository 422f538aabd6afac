#pragma once

#include <cstdint>

#include "avdb/dataset.hpp"

namespace avdb {

/// Lazy learner: stores the training set verbatim and classifies by majority
/// vote among the k nearest samples in Euclidean metric.
struct KnnModel {
    std::uint32_t k = 5;
    std::vector<LabeledSample> train;
    std::size_t feature_dim = 0;
};

KnnModel knn_fit(const Dataset& ds, std::uint32_t k);

/// Squared-distance ranking with deterministic tie-break (distance, then
/// training index); even-vote ties resolve to the nearest neighbor's label.
Label knn_predict(const KnnModel& m, const FeatureVector& x);

}  // namespace avdb
