#include "avdb/svm.hpp"

#include <numeric>
#include <string>

#include "avdb/error.hpp"
#include "avdb/rng.hpp"

namespace avdb {

static void check_dim(const SvmModel& m, const FeatureVector& x) {
    if (x.size() != m.w.size())
        raise(ErrorCode::DimMismatch, "input dim " + std::to_string(x.size()) +
                                          " != model dim " + std::to_string(m.w.size()));
}

double svm_decision(const SvmModel& m, const FeatureVector& x) {
    check_dim(m, x);
    double acc = m.b;
    for (std::size_t i = 0; i < x.size(); ++i) acc += m.w[i] * x[i];
    return acc;
}

Label svm_predict(const SvmModel& m, const FeatureVector& x) {
    return svm_decision(m, x) >= 0.0 ? Label::Drone : Label::Bird;
}

double svm_objective(const SvmModel& m, const Dataset& ds, double lambda) {
    double hinge = 0.0;
    for (const auto& s : ds.samples) {
        double margin = static_cast<int>(s.label) * svm_decision(m, s.features);
        if (margin < 1.0) hinge += 1.0 - margin;
    }
    double w2 = 0.0;
    for (double v : m.w) w2 += v * v;
    return 0.5 * lambda * w2 + hinge / static_cast<double>(ds.samples.size());
}

SvmModel svm_train(const Dataset& ds, const SvmTrainConfig& cfg) {
    if (ds.samples.empty()) raise(ErrorCode::EmptyDataset, "svm needs training data");
    if (ds.count(Label::Drone) == 0 || ds.count(Label::Bird) == 0)
        raise(ErrorCode::SingleClassDataset, "svm training needs both classes");
    if (!(cfg.lambda > 0.0) || !(cfg.lr0 > 0.0) || cfg.epochs < 1)
        raise(ErrorCode::InvalidArgument, "svm config values must be positive");

    const std::size_t n = ds.samples.size();
    const std::size_t dim = ds.feature_dim;

    SvmModel m;
    m.w.assign(dim, 0.0);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cfg.lr0 / (1.0 + epoch);
        const double keep = 1.0 - lr * cfg.lambda;
        rng.shuffle(order);
        for (std::size_t i : order) {
            const auto& s = ds.samples[i];
            const double y = static_cast<int>(s.label);
            const double* x = s.features.data();
            double margin = y * svm_decision(m, s.features);
            if (margin < 1.0) {
                for (std::size_t j = 0; j < dim; ++j)
                    m.w[j] = keep * m.w[j] + lr * y * x[j];
                m.b += lr * y;
            } else {
                for (std::size_t j = 0; j < dim; ++j) m.w[j] = keep * m.w[j];
            }
        }
    }
    return m;
}

}  // namespace avdb
