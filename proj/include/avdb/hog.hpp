#pragma once

#include <vector>

#include "avdb/image.hpp"

namespace avdb {

using FeatureVector = std::vector<double>;

/// Histogram-of-oriented-gradients parameters. Defaults follow the canonical
/// formulation: 8-px cells, 2x2-cell blocks at stride 1, 9 unsigned
/// orientation bins over [0, 180), L2-Hys with 0.2 clip.
struct HogConfig {
    int cell_size = 8;       // pixels per cell side
    int block_size = 2;      // cells per block side
    int block_stride = 1;    // cells between block origins
    int bins = 9;            // orientation bins over [0, 180)
    double clip = 0.2;       // L2-Hys clipping threshold
};

struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;    // row-major
    std::vector<double> orientation;  // degrees in [0, 180)
};

/// Central differences with replicate borders; orientation folded to
/// [0, 180). Input must be at least 3x3.
GradientField compute_gradients(const GrayTensor& t);

/// Block-normalized orientation histograms, concatenated blocks row-major,
/// cells row-major within a block, bins ascending. Image dims must be
/// divisible by cell_size.
FeatureVector hog_descriptor(const GrayTensor& t, const HogConfig& cfg = {});

/// Descriptor length for a given square image size and config.
std::size_t hog_dim(int width, int height, const HogConfig& cfg = {});

}  // namespace avdb
