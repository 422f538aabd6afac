#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace avdb {

/// splitmix64 stream. Every random choice in the toolkit goes through this
/// generator so that runs are reproducible bit-for-bit from a single seed,
/// independent of platform or standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Lemire multiply-shift; n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Standard normal via Box-Muller (one value per call; fully specified,
    /// unlike std::normal_distribution).
    double next_gaussian() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Mixes a stream id into a seed so that independent consumers (per-image,
/// per-class) get decorrelated deterministic streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
    return r.next_u64();
}

}  // namespace avdb
