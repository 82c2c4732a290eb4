#pragma once

// Blockade-constrained Hilbert space: the independent sets of a conflict graph.

#include "rydimer/bits.hpp"
#include "rydimer/errors.hpp"
#include "rydimer/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rydimer {

inline constexpr std::size_t kDefaultDimensionCap = 20'000'000;

class Basis {
  public:
    Basis() = default;
    Basis(int n_atoms, std::vector<Configuration> states, std::uint64_t graph_hash)
        : n_atoms_(n_atoms), states_(std::move(states)), graph_hash_(graph_hash) {}

    std::size_t dim() const { return states_.size(); }
    int n_atoms() const { return n_atoms_; }
    std::uint64_t graph_hash() const { return graph_hash_; }
    const std::vector<Configuration>& states() const { return states_; }

    const Configuration& state_at(std::size_t k) const {
        if (k >= states_.size()) throw NotInBasisError("ordinal " + std::to_string(k) + " out of range");
        return states_[k];
    }

    /// Returns dim() when absent.
    std::size_t find(const Configuration& c) const {
        auto it = std::lower_bound(states_.begin(), states_.end(), c);
        if (it == states_.end() || *it != c) return states_.size();
        return static_cast<std::size_t>(it - states_.begin());
    }

    std::size_t index_of(const Configuration& c) const {
        const std::size_t k = find(c);
        if (k == states_.size()) throw NotInBasisError("configuration is not in the basis");
        return k;
    }

    bool contains(const Configuration& c) const { return find(c) != states_.size(); }

    friend bool operator==(const Basis&, const Basis&) = default;

  private:
    int n_atoms_ = 0;
    std::vector<Configuration> states_;
    std::uint64_t graph_hash_ = 0;
};

namespace detail {

// Decides atoms from the highest index down, 0-branch first, so configurations
// come out in ascending numeric order.
struct IndependentSetWalker {
    const ConflictGraph& g;
    std::size_t cap;
    std::vector<Configuration>* out;  // null: count only
    std::size_t count = 0;

    void visit(int atom, const Configuration& occ, const Configuration& forbidden) {
        if (atom < 0) {
            if (++count > cap) throw CapacityError(cap, "independent-set enumeration");
            if (out) out->push_back(occ);
            return;
        }
        visit(atom - 1, occ, forbidden);
        if (!forbidden.test(static_cast<std::size_t>(atom))) {
            Configuration o = occ;
            o.set(static_cast<std::size_t>(atom));
            visit(atom - 1, o, forbidden | g.masks[static_cast<std::size_t>(atom)]);
        }
    }
};

}  // namespace detail

/// Counts independent sets without storing them.
inline std::size_t count_independent_sets(const ConflictGraph& g, std::size_t cap = kDefaultDimensionCap) {
    detail::IndependentSetWalker w{g, cap, nullptr};
    w.visit(g.n_atoms - 1, {}, {});
    return w.count;
}

/// All configurations respecting the conflict graph, sorted ascending.
inline Basis enumerate_basis(const ConflictGraph& g, std::size_t cap = kDefaultDimensionCap) {
    std::vector<Configuration> states;
    detail::IndependentSetWalker w{g, cap, &states};
    w.visit(g.n_atoms - 1, {}, {});
    return Basis(g.n_atoms, std::move(states), g.content_hash());
}

// ---------------------------------------------------------------------------
// Binary cache: "RYDBASIS" | u32 version | u32 n_atoms | u64 dim | u64 graph hash | dim x words x u64 (LE)

inline constexpr std::array<char, 8> kBasisMagic{'R', 'Y', 'D', 'B', 'A', 'S', 'I', 'S'};
inline constexpr std::uint32_t kBasisFormatVersion = 1;

namespace detail {
inline void put_le(std::ostream& os, std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xffu));
}
inline bool get_le(std::istream& is, std::uint64_t& v, int bytes) {
    v = 0;
    for (int b = 0; b < bytes; ++b) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) return false;
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
    }
    return true;
}
}  // namespace detail

inline void save_basis(const Basis& b, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp + " for writing");
        os.write(kBasisMagic.data(), kBasisMagic.size());
        detail::put_le(os, kBasisFormatVersion, 4);
        detail::put_le(os, static_cast<std::uint64_t>(b.n_atoms()), 4);
        detail::put_le(os, b.dim(), 8);
        detail::put_le(os, b.graph_hash(), 8);
        for (const auto& s : b.states())
            for (auto w : s.w) detail::put_le(os, w, 8);
        if (!os) throw Error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

/// Loads a cached basis and checks it belongs to `g`. Throws CacheInvalidError otherwise.
inline Basis load_basis(const std::filesystem::path& path, const ConflictGraph& g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CacheInvalidError("cannot open basis cache " + path.string());
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kBasisMagic) throw CacheInvalidError("bad magic in " + path.string());
    std::uint64_t version = 0, n = 0, dim = 0, hash = 0;
    if (!detail::get_le(is, version, 4) || !detail::get_le(is, n, 4) || !detail::get_le(is, dim, 8) ||
        !detail::get_le(is, hash, 8))
        throw CacheInvalidError("truncated header in " + path.string());
    if (version != kBasisFormatVersion) throw CacheInvalidError("unsupported cache version " + std::to_string(version));
    if (static_cast<int>(n) != g.n_atoms) throw CacheInvalidError("atom count mismatch");
    if (hash != g.content_hash()) throw CacheInvalidError("conflict-graph hash mismatch");
    std::vector<Configuration> states(dim);
    for (auto& s : states)
        for (auto& w : s.w)
            if (!detail::get_le(is, w, 8)) throw CacheInvalidError("truncated state table in " + path.string());
    if (is.peek() != std::char_traits<char>::eof()) throw CacheInvalidError("trailing bytes in " + path.string());
    if (!std::is_sorted(states.begin(), states.end())) throw CacheInvalidError("state table not sorted");
    return Basis(g.n_atoms, std::move(states), hash);
}

}  // namespace rydimer
