#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace rydimer {

/// Fixed-width occupation bitmask. Bit i set means atom i is in the Rydberg state.
template <std::size_t Words>
struct BitConfig {
    static constexpr std::size_t words = Words;
    static constexpr std::size_t capacity = 64 * Words;

    std::array<std::uint64_t, Words> w{};

    constexpr bool test(std::size_t i) const { return (w[i >> 6] >> (i & 63)) & 1u; }
    constexpr void set(std::size_t i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
    constexpr void reset(std::size_t i) { w[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    constexpr void flip(std::size_t i) { w[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    constexpr BitConfig flipped(std::size_t i) const {
        BitConfig c = *this;
        c.flip(i);
        return c;
    }

    constexpr int count() const {
        int n = 0;
        for (auto x : w) n += std::popcount(x);
        return n;
    }

    constexpr bool none() const {
        for (auto x : w)
            if (x) return false;
        return true;
    }

    constexpr bool intersects(const BitConfig& o) const {
        for (std::size_t k = 0; k < Words; ++k)
            if (w[k] & o.w[k]) return true;
        return false;
    }

    constexpr BitConfig& operator|=(const BitConfig& o) {
        for (std::size_t k = 0; k < Words; ++k) w[k] |= o.w[k];
        return *this;
    }
    constexpr BitConfig& operator&=(const BitConfig& o) {
        for (std::size_t k = 0; k < Words; ++k) w[k] &= o.w[k];
        return *this;
    }
    friend constexpr BitConfig operator|(BitConfig a, const BitConfig& b) { return a |= b; }
    friend constexpr BitConfig operator&(BitConfig a, const BitConfig& b) { return a &= b; }

    /// Numeric ordering: the highest word is the most significant.
    friend constexpr std::strong_ordering operator<=>(const BitConfig& a, const BitConfig& b) {
        for (std::size_t k = Words; k-- > 0;) {
            if (a.w[k] != b.w[k]) return a.w[k] <=> b.w[k];
        }
        return std::strong_ordering::equal;
    }
    friend constexpr bool operator==(const BitConfig&, const BitConfig&) = default;

    /// Calls f(i) for each set bit in ascending order.
    template <class F>
    constexpr void for_each_set(F&& f) const {
        for (std::size_t k = 0; k < Words; ++k) {
            std::uint64_t x = w[k];
            while (x) {
                f(k * 64 + static_cast<std::size_t>(std::countr_zero(x)));
                x &= x - 1;
            }
        }
    }
};

/// Clusters up to 128 atoms; the largest presets use 72.
using Configuration = BitConfig<2>;

}  // namespace rydimer

template <std::size_t W>
struct std::hash<rydimer::BitConfig<W>> {
    std::size_t operator()(const rydimer::BitConfig<W>& c) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto x : c.w) h = (h ^ x) * 0xff51afd7ed558ccdull;
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
};
