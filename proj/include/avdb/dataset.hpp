#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "avdb/hog.hpp"
#include "avdb/image.hpp"

namespace avdb {

enum class Label : int { Drone = +1, Bird = -1 };

inline const char* label_name(Label l) { return l == Label::Drone ? "drone" : "bird"; }

enum class FeatureMode { RawPixels, Hog };

inline const char* feature_mode_name(FeatureMode m) {
    return m == FeatureMode::RawPixels ? "raw" : "hog";
}

/// One feature/label pair; id is the source filename or synthetic id.
struct LabeledSample {
    std::string id;
    FeatureVector features;
    Label label = Label::Drone;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    std::size_t feature_dim = 0;

    std::size_t size() const { return samples.size(); }
    std::size_t count(Label l) const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

/// Loads `<root>/drone` and `<root>/bird` (pgm/ppm), preprocesses every image
/// (grayscale, resize to image_size^2, normalize) and featurizes it. Samples
/// are ordered drone-first, lexicographic filename within a class.
Dataset load_directory(const std::filesystem::path& root, int image_size,
                       FeatureMode mode, const HogConfig& hog = {});

/// Stratified split: per class, a seeded shuffle (splitmix64 Fisher-Yates)
/// selects floor(train_fraction * class_count) training samples. Sample order
/// within each part follows the input dataset order.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const SplitSpec& spec);

/// Renders one synthetic silhouette sample; a pure function of its arguments,
/// so corpora regenerate bit-identically.
Image render_sample(std::uint64_t seed, Label label, std::uint32_t index, int size);

/// In-memory synthetic corpus: count_per_class drones then count_per_class
/// birds, featurized per `mode`.
Dataset generate_synthetic(std::uint32_t count_per_class, int size, std::uint64_t seed,
                           FeatureMode mode = FeatureMode::RawPixels,
                           const HogConfig& hog = {});

/// Writes the synthetic corpus as `<root>/{drone,bird}/*.pgm` plus a
/// `manifest.csv` (id,class,seed,index). Returns the number of images written.
std::size_t write_synthetic(const std::filesystem::path& root,
                            std::uint32_t count_per_class, int size,
                            std::uint64_t seed);

/// Reinterprets a raw-pixel feature vector as its image grid.
GrayTensor features_as_tensor(const FeatureVector& f, int size);

}  // namespace avdb
