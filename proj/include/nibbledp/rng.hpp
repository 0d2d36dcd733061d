#pragma once

#include <cstdint>
#include <initializer_list>

namespace nibbledp {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Tags that keep unrelated random decisions on disjoint derived streams.
enum class StreamPurpose : std::uint64_t {
    graph_gen = 1,
    corr_pair = 2,
    activation = 3,
    flip = 4,
    finisher_init = 5,
    finisher_resample = 6,
};

/// Splittable counter-based generator (splitmix64 core). A stream is derived
/// from a master seed plus a key tuple, so any single decision in a run can be
/// recomputed in isolation and streams for different keys never interleave.
class Stream {
  public:
    explicit Stream(std::uint64_t state) : state_(state) {}

    /// Derive a child stream from a master seed and a key tuple.
    static Stream derive(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
        std::uint64_t h = detail::mix64(master + 0x9E3779B97F4A7C15ULL);
        for (std::uint64_t part : key) {
            h = detail::mix64(h ^ (part + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
        }
        return Stream(h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    /// Implemented here rather than via <random> so results are identical
    /// across standard library implementations.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(T* data, std::size_t n) {
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            T tmp = data[i - 1];
            data[i - 1] = data[j];
            data[j] = tmp;
        }
    }

  private:
    std::uint64_t state_;
};

inline std::uint64_t purpose_tag(StreamPurpose p) { return static_cast<std::uint64_t>(p); }

} // namespace nibbledp
