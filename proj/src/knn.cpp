#include "avdb/knn.hpp"

#include <algorithm>
#include <string>

#include "avdb/error.hpp"

namespace avdb {

KnnModel knn_fit(const Dataset& ds, std::uint32_t k) {
    if (ds.samples.empty()) raise(ErrorCode::EmptyDataset, "knn needs training data");
    if (k < 1) raise(ErrorCode::InvalidArgument, "k must be >= 1");
    if (k > ds.samples.size())
        raise(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                        std::to_string(ds.samples.size()) + " samples");
    return KnnModel{k, ds.samples, ds.feature_dim};
}

Label knn_predict(const KnnModel& m, const FeatureVector& x) {
    if (x.size() != m.feature_dim)
        raise(ErrorCode::DimMismatch, "query dim " + std::to_string(x.size()) +
                                          " != model dim " +
                                          std::to_string(m.feature_dim));

    std::vector<std::pair<double, std::size_t>> ranked(m.train.size());
    for (std::size_t i = 0; i < m.train.size(); ++i) {
        const double* t = m.train[i].features.data();
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double diff = x[j] - t[j];
            d2 += diff * diff;
        }
        ranked[i] = {d2, i};
    }
    // (distance, index) pairs sort deterministically; partial sort gives the
    // k nearest with the smaller-index tie rule built in.
    std::partial_sort(ranked.begin(), ranked.begin() + m.k, ranked.end());

    int votes_drone = 0;
    for (std::uint32_t i = 0; i < m.k; ++i)
        if (m.train[ranked[i].second].label == Label::Drone) ++votes_drone;
    int votes_bird = static_cast<int>(m.k) - votes_drone;
    if (votes_drone > votes_bird) return Label::Drone;
    if (votes_bird > votes_drone) return Label::Bird;
    return m.train[ranked[0].second].label;  // vote tie: nearest neighbor decides
}

}  // namespace avdb
