#pragma once

// Seeded randomness used across the pipeline. Everything here is defined in
// terms of the mt19937_64 output stream, so a given seed reproduces the same
// values on any conforming platform (std::uniform_int_distribution and
// friends are implementation-defined and are deliberately not used).

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dietmine::rng {

using Engine = std::mt19937_64;

// FNV-1a hash of a stage name, mixed into the master seed. Each pipeline
// stage derives its own stream as mix_seed(master, "stage-name").
inline std::uint64_t mix_seed(std::uint64_t master, std::string_view stage) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : stage) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return master ^ h;
}

// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t next_below(Engine& eng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % bound;
}

inline std::int64_t next_in(Engine& eng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(eng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Uniform double in [0, 1) with 53 random bits.
inline double next_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (the cosine branch only, kept stateless).
inline double next_normal(Engine& eng) {
    double u1 = (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
    double u2 = next_unit(eng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
}

// Fisher-Yates shuffle driven by next_below.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(next_below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Sample k distinct indices from [0, n) without replacement (partial
// Fisher-Yates); the result order is the draw order.
inline std::vector<std::size_t> sample_indices(Engine& eng, std::size_t n,
                                               std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(next_below(eng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

} // namespace dietmine::rng
