#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace crosstask::rng {

// std::mt19937_64 output is fully specified by the standard, but the
// std::uniform_* distributions are not. Sampling below is written out so
// seeded results are identical across compilers and platforms.

/// Uniform integer in [0, n) via rejection sampling. n must be > 0.
inline uint64_t bounded(std::mt19937_64& gen, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

/// Fisher-Yates shuffle with the explicit bounded sampler.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded(gen, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// k distinct indices from [0, n), in ascending order.
inline std::vector<size_t> sample_without_replacement(size_t n, size_t k, std::mt19937_64& gen) {
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx, gen);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace crosstask::rng
