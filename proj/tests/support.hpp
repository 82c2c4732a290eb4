#pragma once

// Independent reference implementations used as test oracles. Nothing here
// goes through the library's enumeration or operator-assembly code.

#include "rydimer/geometry.hpp"
#include "rydimer/hilbert.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

namespace rydimer::testing {

inline LatticeSpec make_spec(LatticeKind kind, DimerModel model, Vec2i s1, Vec2i s2, int species = 1,
                             double r = 1.0 / 6.0) {
    LatticeSpec s;
    s.kind = kind;
    s.model = model;
    s.span1 = s1;
    s.span2 = s2;
    s.species_count = species;
    s.gadget_offset = r;
    return s;
}

inline std::uint64_t low_word(const Configuration& c) { return c.w[0]; }

/// Neighbour masks from pairwise distances (gadget) or shared vertices (diluted), n <= 64.
inline std::vector<std::uint64_t> neighbour_masks(const AtomArray& arr, double rb) {
    const int n = arr.size();
    std::vector<std::uint64_t> m(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            bool conflict = false;
            if (arr.is_gadget()) {
                conflict = arr.distance(i, j) < rb;
            } else {
                const auto& a = arr.cluster.edges[static_cast<std::size_t>(arr.atoms[static_cast<std::size_t>(i)].edge_id)];
                const auto& b = arr.cluster.edges[static_cast<std::size_t>(arr.atoms[static_cast<std::size_t>(j)].edge_id)];
                conflict = a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head;
            }
            if (conflict) m[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
        }
    return m;
}

/// All independent sets by scanning every bitmask of n <= 26 atoms, ascending.
inline std::vector<std::uint64_t> brute_force_independent_sets(const std::vector<std::uint64_t>& masks) {
    const int n = static_cast<int>(masks.size());
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        bool ok = true;
        for (std::uint64_t x = s; x && ok; x &= x - 1)
            if (masks[static_cast<std::size_t>(std::countr_zero(x))] & s) ok = false;
        if (ok) out.push_back(s);
    }
    return out;
}

/// Independent sets for up to 64 atoms by an explicit-stack search over atoms in
/// increasing order, then sorted. Used where 2^n scanning is too slow.
inline std::vector<std::uint64_t> stack_independent_sets(const std::vector<std::uint64_t>& masks) {
    const int n = static_cast<int>(masks.size());
    struct Frame {
        int next;
        std::uint64_t set;
        std::uint64_t blocked;
    };
    std::vector<std::uint64_t> out;
    std::vector<Frame> stack{{0, 0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.next == n) {
            out.push_back(f.set);
            continue;
        }
        stack.push_back({f.next + 1, f.set, f.blocked});
        const std::uint64_t bit = std::uint64_t{1} << f.next;
        if (!(f.blocked & bit)) stack.push_back({f.next + 1, f.set | bit, f.blocked | masks[static_cast<std::size_t>(f.next)]});
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// H_ij = omega when the states differ by one atom, diagonal -delta * sum c_i n_i.
inline Eigen::MatrixXd dense_projected(const AtomArray& arr, const Basis& b, double omega, double delta) {
    const auto n = static_cast<Eigen::Index>(b.dim());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Configuration& si = b.states()[static_cast<std::size_t>(i)];
        double d = 0.0;
        for (int a = 0; a < arr.size(); ++a)
            if (si.test(static_cast<std::size_t>(a))) d -= delta * arr.atoms[static_cast<std::size_t>(a)].detuning_coeff;
        H(i, i) = d;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Configuration& sj = b.states()[static_cast<std::size_t>(j)];
            int diff = 0;
            for (std::size_t w = 0; w < Configuration::words; ++w) diff += std::popcount(si.w[w] ^ sj.w[w]);
            if (diff == 1) H(i, j) = omega;
        }
    }
    return H;
}

/// Perfect matchings by filtering every subset of V/2 edges.
inline std::vector<std::vector<int>> brute_force_matchings(const Cluster& cl) {
    const int ne = cl.edge_count(), nv = cl.vertex_count();
    std::vector<std::vector<int>> out;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << ne); ++s) {
        if (std::popcount(s) * 2 != nv) continue;
        std::vector<int> deg(static_cast<std::size_t>(nv), 0);
        std::vector<int> es;
        for (int e = 0; e < ne; ++e)
            if ((s >> e) & 1u) {
                es.push_back(e);
                ++deg[static_cast<std::size_t>(cl.edges[static_cast<std::size_t>(e)].tail)];
                ++deg[static_cast<std::size_t>(cl.edges[static_cast<std::size_t>(e)].head)];
            }
        bool ok = true;
        for (int d : deg) ok = ok && d == 1;
        if (ok) out.push_back(es);
    }
    return out;
}

}  // namespace rydimer::testing
