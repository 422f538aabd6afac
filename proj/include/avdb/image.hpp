#pragma once

#include <cstdint>
#include <vector>

namespace avdb {

/// Decoded raster, 8-bit pixels, row-major, channel-interleaved.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 or 3
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[static_cast<std::size_t>(y * width + x) * channels + c];
    }
};

/// Grayscale image normalized to [0, 1], row-major. Input to HOG and CNN.
struct GrayTensor {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

/// Decodes a portable graymap/pixmap (P2/P5 gray, P3/P6 color, maxval 255).
/// Throws MalformedImage / UnsupportedFormat.
Image decode_image(const std::vector<std::uint8_t>& bytes);

/// Encodes as binary PGM (1 channel, P5) or PPM (3 channels, P6).
/// decode_image(encode_image(img)) == img bit-exactly.
std::vector<std::uint8_t> encode_image(const Image& img);

/// BT.601 luma: gray = round(0.299 R + 0.587 G + 0.114 B). Grayscale input
/// is returned unchanged.
Image to_grayscale(const Image& img);

/// Bilinear resize with half-pixel-center mapping; output values rounded to
/// nearest and clamped to [0, 255]. Works per channel.
Image resize_bilinear(const Image& img, int out_w, int out_h);

/// Maps 8-bit grayscale to [0, 1] by dividing by 255. Throws NotGrayscale
/// for multi-channel input.
GrayTensor normalize(const Image& img);

}  // namespace avdb
