#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "avdb/cnn.hpp"
#include "avdb/dataset.hpp"
#include "avdb/knn.hpp"
#include "avdb/svm.hpp"

namespace avdb {

/// Everything eval needs to reproduce the training run's split and
/// preprocessing, echoed into the model file.
struct ModelInfo {
    std::string kind;  // "knn" | "svm" | "cnn"
    int image_size = 64;
    FeatureMode feature_mode = FeatureMode::Hog;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;  // classifier settings, echoed verbatim
};

/// On-disk model file: magic "AVDB1\n", kind tag, version, config echo,
/// module payload. Round-trips bit-exactly.
struct ModelContainer {
    ModelInfo info;
    std::variant<KnnModel, SvmModel, CnnModel> model;
};

void save_model(const std::filesystem::path& path, const ModelContainer& c);

/// Throws BadModelFile on wrong magic, version, or truncated payload.
ModelContainer load_model(const std::filesystem::path& path);

/// Dispatching prediction; CNN input is reshaped from raw-pixel features.
Label predict_any(const ModelContainer& c, const FeatureVector& x);

/// Compact settings summary for the CSV params column, e.g. "k=5" or
/// "depth=3;epochs=80".
std::string params_summary(const ModelContainer& c);

}  // namespace avdb
