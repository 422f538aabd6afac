#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avdb/bench.hpp"
#include "avdb/dataset.hpp"

namespace avdb::cli {

/// Validated settings for one pipeline run, assembled from defaults plus
/// `key = value` config sources; unknown keys are rejected.
struct RunConfig {
    std::string classifier;  // "knn" | "svm" | "cnn"
    int image_size = 64;
    FeatureMode feature_mode = FeatureMode::Hog;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    std::uint32_t knn_k = 5;
    SvmTrainConfig svm;
    CnnTrainConfig cnn;
};

/// Each source is either a config file path or, when it contains '=', a
/// single inline `key=value` assignment. Throws Error(ConfigError).
RunConfig parse_run_config(const std::string& classifier,
                           const std::vector<std::string>& sources);

/// Entry point behind main(); returns the process exit code.
/// Subcommands: gen | train | eval | bench | gradcheck.
int run(const std::vector<std::string>& args);

}  // namespace avdb::cli
