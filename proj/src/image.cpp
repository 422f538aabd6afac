#include "avdb/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "avdb/error.hpp"

namespace avdb {

namespace {

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    bool eof() const { return pos_ >= bytes_.size(); }
    std::uint8_t next() { return bytes_[pos_++]; }
    std::uint8_t peek() const { return bytes_[pos_]; }

    // Skips whitespace and '#' comment lines between header tokens.
    void skip_separators() {
        while (!eof()) {
            std::uint8_t c = peek();
            if (c == '#') {
                while (!eof() && next() != '\n') {
                }
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_header_int() {
        skip_separators();
        if (eof() || peek() < '0' || peek() > '9')
            raise(ErrorCode::MalformedImage, "expected integer in image header");
        long v = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            v = v * 10 + (next() - '0');
            if (v > 1 << 24)
                raise(ErrorCode::MalformedImage, "image header value out of range");
        }
        return static_cast<int>(v);
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image decode_image(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2)
        raise(ErrorCode::MalformedImage, "image payload too short for magic");
    if (bytes[0] != 'P')
        raise(ErrorCode::MalformedImage, "bad magic, not a portable anymap");
    char kind = static_cast<char>(bytes[1]);
    if (kind == '1' || kind == '4')
        raise(ErrorCode::UnsupportedFormat, "portable bitmaps (P1/P4) are not supported");
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        raise(ErrorCode::MalformedImage, std::string("bad magic P") + kind);

    bool plain = (kind == '2' || kind == '3');
    int channels = (kind == '2' || kind == '5') ? 1 : 3;

    ByteReader r(bytes);
    r.next();
    r.next();
    int width = r.read_header_int();
    int height = r.read_header_int();
    int maxval = r.read_header_int();
    if (width < 1 || height < 1)
        raise(ErrorCode::MalformedImage, "non-positive image dimensions");
    if (maxval != 255)
        raise(ErrorCode::UnsupportedFormat, "only maxval 255 is supported");

    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    std::size_t count = static_cast<std::size_t>(width) * height * channels;
    img.pixels.reserve(count);

    if (plain) {
        for (std::size_t i = 0; i < count; ++i) {
            int v = r.read_header_int();
            if (v > 255)
                raise(ErrorCode::MalformedImage, "sample exceeds maxval");
            img.pixels.push_back(static_cast<std::uint8_t>(v));
        }
    } else {
        // Exactly one whitespace byte separates the header from raster data.
        if (r.eof() || !(r.peek() == ' ' || r.peek() == '\t' || r.peek() == '\r' ||
                         r.peek() == '\n'))
            raise(ErrorCode::MalformedImage, "missing separator before raster data");
        r.next();
        if (r.remaining() < count)
            raise(ErrorCode::MalformedImage, "truncated raster data");
        for (std::size_t i = 0; i < count; ++i) img.pixels.push_back(r.next());
    }
    return img;
}

std::vector<std::uint8_t> encode_image(const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        raise(ErrorCode::InvalidArgument, "encode_image expects 1 or 3 channels");
    std::string header = (img.channels == 1 ? "P5\n" : "P6\n");
    header += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

Image to_grayscale(const Image& img) {
    if (img.channels == 1) return img;
    Image out;
    out.width = img.width;
    out.height = img.height;
    out.channels = 1;
    out.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    const std::uint8_t* src = img.pixels.data();
    for (std::size_t i = 0; i < out.pixels.size(); ++i, src += 3) {
        double gray = 0.299 * src[0] + 0.587 * src[1] + 0.114 * src[2];
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(gray));
    }
    return out;
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        raise(ErrorCode::InvalidArgument, "target dimensions must be positive");
    Image out;
    out.width = out_w;
    out.height = out_h;
    out.channels = img.channels;
    out.pixels.resize(static_cast<std::size_t>(out_w) * out_h * img.channels);

    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    const int ch = img.channels;

    for (int dy = 0; dy < out_h; ++dy) {
        double fy = (dy + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = fy - y0;
        for (int dx = 0; dx < out_w; ++dx) {
            double fx = (dx + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = fx - x0;
            for (int c = 0; c < ch; ++c) {
                double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                double bot = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                double v = (1.0 - wy) * top + wy * bot;
                long q = std::lround(v);
                out.pixels[(static_cast<std::size_t>(dy) * out_w + dx) * ch + c] =
                    static_cast<std::uint8_t>(std::clamp(q, 0l, 255l));
            }
        }
    }
    return out;
}

GrayTensor normalize(const Image& img) {
    if (img.channels != 1)
        raise(ErrorCode::NotGrayscale, "normalize expects a single-channel image");
    GrayTensor t;
    t.width = img.width;
    t.height = img.height;
    t.values.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        t.values[i] = img.pixels[i] / 255.0;
    return t;
}

}  // namespace avdb
