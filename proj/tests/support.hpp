#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "avdb/image.hpp"

namespace avdb::test {

/// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& hint) {
        auto base = std::filesystem::temp_directory_path();
        static std::atomic<unsigned> counter{0};
        path_ = base / ("avdb_" + hint + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline GrayTensor make_tensor(int w, int h, std::vector<double> v) {
    GrayTensor t;
    t.width = w;
    t.height = h;
    t.values = std::move(v);
    return t;
}

inline Image make_image(int w, int h, int channels, std::vector<std::uint8_t> px) {
    Image img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.pixels = std::move(px);
    return img;
}

inline Image random_image(std::mt19937& gen, int w, int h, int channels) {
    std::uniform_int_distribution<int> d(0, 255);
    Image img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.pixels.resize(static_cast<std::size_t>(w) * h * channels);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(gen));
    return img;
}

inline GrayTensor random_tensor(std::mt19937& gen, int w, int h) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    GrayTensor t;
    t.width = w;
    t.height = h;
    t.values.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : t.values) v = d(gen);
    return t;
}

}  // namespace avdb::test
