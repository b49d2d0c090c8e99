#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace eci {

// splitmix64. Cheap to construct, so it doubles as the per-entity generator
// where one stream per (seed, tag...) is needed.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0,n). Rejection keeps the draw unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

private:
    std::uint64_t state_;
};

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named substreams: every random decision draws from a stream derived from
// the run seed plus tags identifying the decision, so replays are exact and
// per-entity streams do not depend on processing order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t t : tags) {
        s = mix64(s ^ (t + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2)));
    }
    return s;
}

namespace stream {
// Top-level substream tags.
constexpr std::uint64_t population = 1;
constexpr std::uint64_t initial_spread = 2;
constexpr std::uint64_t spread_round = 3;
constexpr std::uint64_t monte_carlo = 4;
}  // namespace stream

// First k elements of a uniform random permutation of `candidates`
// (partial Fisher-Yates). Deterministic given the candidate order.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> candidates, std::size_t k, SplitMix64& rng) {
    if (k > candidates.size()) k = candidates.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(k);
    return candidates;
}

}  // namespace eci
