#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace fastforest {

/// splitmix64 finalizer; used for seed mixing and as the stream generator core.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic 64-bit random stream (splitmix64). Draw sequences depend only
/// on the seed, not on platform or standard-library version, so models built
/// from the same seed are reproducible everywhere.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, n). n must be >= 1. Lemire multiply-shift with
    /// rejection, so the result is exactly uniform.
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_ = 0;
};

/// Seed for the j-th tree's private stream. Fixed derivation so runs can be
/// reproduced by other implementations: mix64(master ^ mix64(j + 1)).
inline std::uint64_t tree_stream_seed(std::uint64_t master_seed, std::uint64_t tree_index) {
    return mix64(master_seed ^ mix64(tree_index + 1));
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// k distinct values drawn uniformly from [0, n) by partial Fisher-Yates;
/// result order is the draw order. k must be <= n.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           RngStream& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace fastforest
