#pragma once

// Deterministic random streams.
//
// All randomness goes through std::mt19937_64, whose output sequence is fixed
// by the standard. The distribution helpers below are hand-written because the
// std:: distributions are implementation-defined and would make results
// differ between standard libraries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace pom {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for substream `index` of `master`. Stable across builds:
//   derive_seed(m, i) = mix64(mix64(m) ^ mix64(i + 0x632be59bd9b4e019))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = master;
    for (auto p : path) s = derive_seed(s, p);
    return s;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi); never returns hi.
inline double uniform(Rng& rng, double lo, double hi) {
    double v = lo + (hi - lo) * uniform01(rng);
    return v < hi ? v : std::nextafter(hi, lo);
}

// Uniform integer in [0, n) by rejection, n > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return static_cast<std::size_t>(v % range);
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

// Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace pom
