#pragma once

// Independent reference implementations used to cross-check the library.
// These deliberately share no code with src/: naive loops, full sorts and
// direct formula evaluation only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "avdb/cnn.hpp"
#include "avdb/dataset.hpp"
#include "avdb/image.hpp"
#include "avdb/metrics.hpp"

namespace avdb::test {

/// Bilinear sample of an image channel at continuous source coordinates,
/// evaluated straight from the interpolation formula.
inline double bilinear_at(const Image& img, double fx, double fy, int c) {
    fx = std::min(std::max(fx, 0.0), static_cast<double>(img.width - 1));
    fy = std::min(std::max(fy, 0.0), static_cast<double>(img.height - 1));
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double ax = fx - x0, ay = fy - y0;
    double v00 = img.at(x0, y0, c), v10 = img.at(x1, y0, c);
    double v01 = img.at(x0, y1, c), v11 = img.at(x1, y1, c);
    return (1 - ay) * ((1 - ax) * v00 + ax * v10) + ay * ((1 - ax) * v01 + ax * v11);
}

/// Full-sort k-nearest-neighbor vote with knn_predict's documented tie
/// rules: rank by (squared distance, training index); vote ties go to the
/// nearest neighbor.
inline Label knn_oracle(const std::vector<LabeledSample>& train,
                        const FeatureVector& x, std::uint32_t k) {
    struct Entry {
        double d2;
        std::size_t idx;
    };
    std::vector<Entry> all;
    for (std::size_t i = 0; i < train.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double d = x[j] - train[i].features[j];
            d2 += d * d;
        }
        all.push_back({d2, i});
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        return a.idx < b.idx;
    });
    int drone = 0, bird = 0;
    for (std::uint32_t i = 0; i < k; ++i)
        (train[all[i].idx].label == Label::Drone ? drone : bird) += 1;
    if (drone != bird) return drone > bird ? Label::Drone : Label::Bird;
    return train[all[0].idx].label;
}

/// Quadruple-nested-loop cross-correlation with explicit zero padding.
inline Tensor3 conv_oracle(const Tensor3& x, const ConvLayer& layer) {
    int k = layer.ksize, r = k / 2;
    Tensor3 out = Tensor3::zeros(layer.out_channels, x.height, x.width);
    for (int o = 0; o < layer.out_channels; ++o)
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx) {
                double acc = layer.bias[o];
                for (int c = 0; c < layer.in_channels; ++c)
                    for (int u = 0; u < k; ++u)
                        for (int v = 0; v < k; ++v) {
                            int sy = y + u - r, sx = xx + v - r;
                            if (sy < 0 || sy >= x.height || sx < 0 || sx >= x.width)
                                continue;
                            acc += layer.kernel(o, c, u, v) * x.at(c, sy, sx);
                        }
                out.at(o, y, xx) = acc;
            }
    return out;
}

/// Window-scanning 2x2 max (values only).
inline Tensor3 pool_oracle(const Tensor3& x) {
    Tensor3 out = Tensor3::zeros(x.channels, x.height / 2, x.width / 2);
    for (int c = 0; c < x.channels; ++c)
        for (int y = 0; y < x.height / 2; ++y)
            for (int xx = 0; xx < x.width / 2; ++xx) {
                double m = x.at(c, 2 * y, 2 * xx);
                m = std::max(m, x.at(c, 2 * y, 2 * xx + 1));
                m = std::max(m, x.at(c, 2 * y + 1, 2 * xx));
                m = std::max(m, x.at(c, 2 * y + 1, 2 * xx + 1));
                out.at(c, y, xx) = m;
            }
    return out;
}

/// Row-by-row matrix multiply.
inline std::vector<double> fc_oracle(const std::vector<double>& x, const FcLayer& l) {
    std::vector<double> out(l.out_dim, 0.0);
    for (int o = 0; o < l.out_dim; ++o) {
        out[o] = l.bias[o];
        for (int i = 0; i < l.in_dim; ++i)
            out[o] += l.weights[static_cast<std::size_t>(o) * l.in_dim + i] * x[i];
    }
    return out;
}

/// Coarse grid search for a strict linear separator of 2-D points; confirms
/// separability independent of the trained model.
inline bool separator_exists_2d(const std::vector<FeatureVector>& xs,
                                const std::vector<int>& ys) {
    for (int ai = 0; ai < 360; ai += 3) {
        double a = ai * 3.14159265358979323846 / 180.0;
        double w0 = std::cos(a), w1 = std::sin(a);
        double lo = 1e30, hi = -1e30;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double p = w0 * xs[i][0] + w1 * xs[i][1];
            if (ys[i] > 0) lo = std::min(lo, p);
            if (ys[i] < 0) hi = std::max(hi, p);
        }
        if (lo > hi) return true;  // any b in (hi, lo) strictly separates
    }
    return false;
}

/// Independent confusion tally written as a flat loop of if/else branches.
inline ConfusionMatrix confusion_oracle(const std::vector<Label>& preds,
                                        const std::vector<Label>& truth) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (truth[i] == Label::Drone) {
            if (preds[i] == Label::Drone)
                ++cm.tp;
            else
                ++cm.fn;
        } else {
            if (preds[i] == Label::Bird)
                ++cm.tn;
            else
                ++cm.fp;
        }
    }
    return cm;
}

}  // namespace avdb::test
