#include "avdb/hog.hpp"

#include <cmath>
#include <string>

#include "avdb/error.hpp"

namespace avdb {

namespace {
constexpr double kNormGuard = 1e-12;
constexpr double kRadToDeg = 57.295779513082320877;
}  // namespace

GradientField compute_gradients(const GrayTensor& t) {
    if (t.width < 3 || t.height < 3)
        raise(ErrorCode::ImageTooSmall, "gradient field needs at least 3x3 input");
    GradientField g;
    g.width = t.width;
    g.height = t.height;
    g.magnitude.resize(t.values.size());
    g.orientation.resize(t.values.size());
    for (int y = 0; y < t.height; ++y) {
        int ym = y > 0 ? y - 1 : 0;
        int yp = y < t.height - 1 ? y + 1 : t.height - 1;
        for (int x = 0; x < t.width; ++x) {
            int xm = x > 0 ? x - 1 : 0;
            int xp = x < t.width - 1 ? x + 1 : t.width - 1;
            double gx = t.at(xp, y) - t.at(xm, y);
            double gy = t.at(x, yp) - t.at(x, ym);
            std::size_t i = static_cast<std::size_t>(y) * t.width + x;
            g.magnitude[i] = std::sqrt(gx * gx + gy * gy);
            double deg = std::atan2(gy, gx) * kRadToDeg;
            if (deg < 0.0) deg += 180.0;
            if (deg >= 180.0) deg -= 180.0;
            g.orientation[i] = deg;
        }
    }
    return g;
}

std::size_t hog_dim(int width, int height, const HogConfig& cfg) {
    int cells_x = width / cfg.cell_size;
    int cells_y = height / cfg.cell_size;
    int blocks_x = (cells_x - cfg.block_size) / cfg.block_stride + 1;
    int blocks_y = (cells_y - cfg.block_size) / cfg.block_stride + 1;
    if (blocks_x < 1 || blocks_y < 1) return 0;
    return static_cast<std::size_t>(blocks_x) * blocks_y * cfg.block_size *
           cfg.block_size * cfg.bins;
}

FeatureVector hog_descriptor(const GrayTensor& t, const HogConfig& cfg) {
    if (cfg.cell_size < 2 || cfg.bins < 2 || cfg.block_size < 1 ||
        cfg.block_stride < 1 || cfg.clip <= 0.0 || cfg.clip > 1.0)
        raise(ErrorCode::InvalidArgument, "invalid hog configuration");
    if (t.width % cfg.cell_size != 0 || t.height % cfg.cell_size != 0)
        raise(ErrorCode::DimsNotDivisible,
              "image dims " + std::to_string(t.width) + "x" + std::to_string(t.height) +
                  " not divisible by cell size " + std::to_string(cfg.cell_size));

    GradientField g = compute_gradients(t);

    const int cells_x = t.width / cfg.cell_size;
    const int cells_y = t.height / cfg.cell_size;
    const int bins = cfg.bins;
    const double bin_width = 180.0 / bins;

    // Per-cell histograms; magnitude votes split linearly between the two
    // nearest bin centers, wrapping across the 0/180 boundary.
    std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * bins, 0.0);
    for (int y = 0; y < t.height; ++y) {
        int cy = y / cfg.cell_size;
        for (int x = 0; x < t.width; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * t.width + x;
            double m = g.magnitude[i];
            if (m == 0.0) continue;
            int cx = x / cfg.cell_size;
            double c = g.orientation[i] / bin_width - 0.5;
            int lo = static_cast<int>(std::floor(c));
            double w_hi = c - lo;
            int b0 = ((lo % bins) + bins) % bins;
            int b1 = (b0 + 1) % bins;
            double* cell = &hist[(static_cast<std::size_t>(cy) * cells_x + cx) * bins];
            cell[b0] += (1.0 - w_hi) * m;
            cell[b1] += w_hi * m;
        }
    }

    const int blocks_x = (cells_x - cfg.block_size) / cfg.block_stride + 1;
    const int blocks_y = (cells_y - cfg.block_size) / cfg.block_stride + 1;
    if (blocks_x < 1 || blocks_y < 1)
        raise(ErrorCode::ImageTooSmall, "image too small for one hog block");

    const int block_len = cfg.block_size * cfg.block_size * bins;
    FeatureVector out;
    out.reserve(static_cast<std::size_t>(blocks_x) * blocks_y * block_len);
    std::vector<double> block(block_len);

    for (int by = 0; by < blocks_y; ++by) {
        for (int bx = 0; bx < blocks_x; ++bx) {
            int k = 0;
            for (int cy = 0; cy < cfg.block_size; ++cy) {
                for (int cx = 0; cx < cfg.block_size; ++cx) {
                    std::size_t cell =
                        (static_cast<std::size_t>(by * cfg.block_stride + cy) * cells_x +
                         (bx * cfg.block_stride + cx)) *
                        bins;
                    for (int b = 0; b < bins; ++b) block[k++] = hist[cell + b];
                }
            }
            // L2-Hys: normalize, clip, renormalize.
            double ss = 0.0;
            for (double v : block) ss += v * v;
            double inv = 1.0 / std::sqrt(ss + kNormGuard * kNormGuard);
            for (double& v : block) {
                v *= inv;
                if (v > cfg.clip) v = cfg.clip;
            }
            ss = 0.0;
            for (double v : block) ss += v * v;
            inv = 1.0 / std::sqrt(ss + kNormGuard * kNormGuard);
            for (double& v : block) out.push_back(v * inv);
        }
    }
    return out;
}

}  // namespace avdb
