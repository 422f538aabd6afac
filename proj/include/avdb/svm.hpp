#pragma once

#include <cstdint>

#include "avdb/dataset.hpp"

namespace avdb {

/// Linear decision boundary w.x + b = 0.
struct SvmModel {
    FeatureVector w;
    double b = 0.0;

    std::size_t dim() const { return w.size(); }
};

struct SvmTrainConfig {
    double lambda = 1e-3;       // L2 regularization on w (b unregularized)
    std::uint32_t epochs = 200;
    double lr0 = 0.1;           // step size schedule lr0 / (1 + epoch)
    std::uint64_t seed = 0;
};

/// w.x + b.
double svm_decision(const SvmModel& m, const FeatureVector& x);

/// Sign rule: decision >= 0 maps to Drone (boundary ties go to Drone).
Label svm_predict(const SvmModel& m, const FeatureVector& x);

/// Regularized hinge loss at (w, b): lambda/2 |w|^2 + mean hinge.
double svm_objective(const SvmModel& m, const Dataset& ds, double lambda);

/// Minimizes lambda/2 |w|^2 + (1/N) sum max(0, 1 - y (w.x + b)) by
/// Pegasos-style per-sample subgradient steps from a zero start, visiting
/// samples in a fresh seeded shuffle each epoch with step size
/// lr0 / (1 + epoch). The bias is unregularized. Deterministic given
/// (dataset order, seed).
SvmModel svm_train(const Dataset& ds, const SvmTrainConfig& cfg = {});

}  // namespace avdb
