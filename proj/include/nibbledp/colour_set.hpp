#pragma once

#include <cstdint>
#include <vector>

#include "nibbledp/errors.hpp"

namespace nibbledp {

/// Colours are 1-based: a palette of size q means colours {1, ..., q}.
using Colour = std::uint32_t;

/// Fixed-capacity bitset over a colour palette {1..q}.
class ColourSet {
  public:
    ColourSet() : q_(0) {}

    explicit ColourSet(Colour q, bool full = false) : q_(q), words_((q + 63) / 64, 0) {
        if (full) {
            for (Colour c = 1; c <= q; ++c) set(c);
        }
    }

    Colour capacity() const { return q_; }

    bool test(Colour c) const {
        if (c < 1 || c > q_) return false;
        return (words_[(c - 1) >> 6] >> ((c - 1) & 63)) & 1ULL;
    }

    void set(Colour c) {
        check_range(c);
        words_[(c - 1) >> 6] |= 1ULL << ((c - 1) & 63);
    }

    void reset(Colour c) {
        check_range(c);
        words_[(c - 1) >> 6] &= ~(1ULL << ((c - 1) & 63));
    }

    std::uint32_t count() const {
        std::uint32_t n = 0;
        for (std::uint64_t w : words_) n += static_cast<std::uint32_t>(__builtin_popcountll(w));
        return n;
    }

    bool empty() const {
        for (std::uint64_t w : words_) {
            if (w != 0) return false;
        }
        return true;
    }

    /// Smallest colour present, or 0 if empty.
    Colour smallest() const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i] != 0) {
                return static_cast<Colour>(i * 64 + static_cast<std::uint32_t>(__builtin_ctzll(words_[i])) + 1);
            }
        }
        return 0;
    }

    /// Largest colour present, or 0 if empty.
    Colour largest() const {
        for (std::size_t i = words_.size(); i > 0; --i) {
            if (words_[i - 1] != 0) {
                return static_cast<Colour>((i - 1) * 64 + (63 - static_cast<std::uint32_t>(__builtin_clzll(words_[i - 1]))) + 1);
            }
        }
        return 0;
    }

    /// n-th colour present in ascending order, 0-based rank; 0 if out of range.
    Colour nth(std::uint32_t rank) const {
        for (Colour c = 1; c <= q_; ++c) {
            if (test(c)) {
                if (rank == 0) return c;
                --rank;
            }
        }
        return 0;
    }

    std::vector<Colour> to_vector() const {
        std::vector<Colour> out;
        out.reserve(count());
        for (Colour c = 1; c <= q_; ++c) {
            if (test(c)) out.push_back(c);
        }
        return out;
    }

    bool operator==(const ColourSet& o) const { return q_ == o.q_ && words_ == o.words_; }
    bool operator!=(const ColourSet& o) const { return !(*this == o); }

  private:
    void check_range(Colour c) const {
        if (c < 1 || c > q_) {
            throw Error(Err::domain_error, "colour " + std::to_string(c) + " outside palette 1.." + std::to_string(q_));
        }
    }

    Colour q_;
    std::vector<std::uint64_t> words_;
};

} // namespace nibbledp
