#pragma once

// Fully-packed dimer coverings of a periodic cluster, their atomic images in
// the gadget model, and the equal-weight RVB superposition.

#include "rydimer/errors.hpp"
#include "rydimer/geometry.hpp"
#include "rydimer/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

namespace rydimer {

/// Sorted edge ids; every vertex touched exactly once.
using DimerCovering = std::vector<int>;

/// Perfect matchings by vertex elimination: take the lowest uncovered vertex
/// and branch over its incident edges whose other end is free.
inline std::vector<DimerCovering> enumerate_coverings(const Cluster& cl) {
    std::vector<DimerCovering> out;
    const int nv = cl.vertex_count();
    if (nv % 2 != 0) return out;
    std::vector<char> covered(static_cast<std::size_t>(nv), 0);
    std::vector<int> chosen;
    std::function<void()> rec = [&]() {
        int v = 0;
        while (v < nv && covered[static_cast<std::size_t>(v)]) ++v;
        if (v == nv) {
            DimerCovering c = chosen;
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
            return;
        }
        std::vector<int> tried;
        for (int e : cl.incident[static_cast<std::size_t>(v)]) {
            if (std::find(tried.begin(), tried.end(), e) != tried.end()) continue;
            tried.push_back(e);
            const Edge& ed = cl.edges[static_cast<std::size_t>(e)];
            const int w = ed.tail == v ? ed.head : ed.tail;
            if (w == v) continue;
            if (covered[static_cast<std::size_t>(w)]) continue;
            covered[static_cast<std::size_t>(v)] = covered[static_cast<std::size_t>(w)] = 1;
            chosen.push_back(e);
            rec();
            chosen.pop_back();
            covered[static_cast<std::size_t>(v)] = covered[static_cast<std::size_t>(w)] = 0;
        }
    };
    rec();
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_perfect_matching(const Cluster& cl, std::span<const int> edges) {
    std::vector<int> deg(static_cast<std::size_t>(cl.vertex_count()), 0);
    for (int e : edges) {
        if (e < 0 || e >= cl.edge_count()) return false;
        ++deg[static_cast<std::size_t>(cl.edges[static_cast<std::size_t>(e)].tail)];
        ++deg[static_cast<std::size_t>(cl.edges[static_cast<std::size_t>(e)].head)];
    }
    return std::all_of(deg.begin(), deg.end(), [](int d) { return d == 1; });
}

/// The gadget atom at vertex v farthest from the edge atom of e. An excited
/// edge atom leaves exactly this atom unblockaded, so it carries the dimer.
inline int far_gadget_atom(const AtomArray& arr, int e, int v) {
    const int ea = arr.edge_atom[static_cast<std::size_t>(e)];
    int best = -1;
    double best_d = -1.0;
    bool tie = false;
    for (int g : arr.gadget_atom[static_cast<std::size_t>(v)]) {
        const double d = arr.distance(ea, g);
        if (d > best_d * (1.0 + kLengthTolerance)) {
            best = g;
            best_d = d;
            tie = false;
        } else if (d > best_d * (1.0 - kLengthTolerance)) {
            tie = true;
        }
    }
    if (tie || best < 0) throw GeometryError("no unique far gadget atom for edge " + std::to_string(e));
    return best;
}

/// Atomic configuration of a covering: the edge atom of each dimer plus, in the
/// gadget model, the far gadget atom at both of its endpoints.
inline Configuration covering_to_config(const DimerCovering& cov, const AtomArray& arr) {
    Configuration c;
    for (int e : cov) {
        c.set(static_cast<std::size_t>(arr.edge_atom[static_cast<std::size_t>(e)]));
        if (!arr.is_gadget()) continue;
        const Edge& ed = arr.cluster.edges[static_cast<std::size_t>(e)];
        c.set(static_cast<std::size_t>(far_gadget_atom(arr, e, ed.tail)));
        c.set(static_cast<std::size_t>(far_gadget_atom(arr, e, ed.head)));
    }
    return c;
}

/// Same as above, checked against the blockade graph.
inline Configuration covering_to_config(const DimerCovering& cov, const AtomArray& arr, const ConflictGraph& g) {
    Configuration c = covering_to_config(cov, arr);
    if (!g.is_independent(c))
        throw GeometryError("covering maps to a blockaded configuration; radii inconsistent with the gadget geometry");
    return c;
}

/// Inverse of covering_to_config. Throws ConstraintError if `c` is not the image of a covering.
inline DimerCovering config_to_covering(const Configuration& c, const AtomArray& arr) {
    DimerCovering cov;
    for (int e = 0; e < arr.cluster.edge_count(); ++e)
        if (c.test(static_cast<std::size_t>(arr.edge_atom[static_cast<std::size_t>(e)]))) cov.push_back(e);
    if (!is_perfect_matching(arr.cluster, cov)) throw ConstraintError("excited edges are not a perfect matching");
    if (covering_to_config(cov, arr) != c) throw ConstraintError("gadget occupation does not match the covering");
    return cov;
}

struct RvbVector {
    std::vector<double> amplitudes;
    std::vector<std::size_t> support;  ///< basis indices of the coverings, ascending
    std::size_t coverings = 0;
};

inline RvbVector rvb_vector(const Basis& basis, const std::vector<DimerCovering>& coverings, const AtomArray& arr) {
    if (coverings.empty()) throw ConstraintError("no coverings: the RVB state is undefined");
    RvbVector r;
    r.coverings = coverings.size();
    r.amplitudes.assign(basis.dim(), 0.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(coverings.size()));
    for (const auto& cov : coverings) {
        const std::size_t k = basis.find(covering_to_config(cov, arr));
        if (k == basis.dim()) throw NotInBasisError("covering configuration absent from basis (radii mismatch?)");
        r.amplitudes[k] = amp;
        r.support.push_back(k);
    }
    std::sort(r.support.begin(), r.support.end());
    return r;
}

/// |<psi|RVB>| for a real or complex state.
template <class T>
double rvb_overlap(std::span<const T> psi, const RvbVector& rvb) {
    if (psi.size() != rvb.amplitudes.size()) throw DimensionError("state/RVB dimension mismatch");
    std::complex<double> s = 0.0;
    for (std::size_t k : rvb.support) s += std::conj(std::complex<double>(psi[k]));
    return std::abs(s) / std::sqrt(static_cast<double>(rvb.coverings));
}

inline void write_coverings_csv(std::ostream& os, const std::vector<DimerCovering>& covs) {
    os << "covering_id,edge_ids\n";
    for (std::size_t i = 0; i < covs.size(); ++i) {
        os << i << ',';
        for (std::size_t k = 0; k < covs[i].size(); ++k) os << (k ? " " : "") << covs[i][k];
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Plaquettes

/// Elementary plaquette (square face or triangular rhombus) with its two
/// flippable dimer patterns: the two pairs of opposite boundary edges.
struct Plaquette {
    int vertex = 0;
    int orientation = 0;
    std::array<int, 2> pattern_a{};
    std::array<int, 2> pattern_b{};
};

/// One plaquette per cell and orientation (1 on the square lattice, 3 rhombi on
/// the triangular one). Plaquettes whose edges or corners alias on a tiny torus
/// are dropped.
inline std::vector<Plaquette> plaquettes(const Cluster& cl) {
    std::vector<Plaquette> out;
    const LatticeKind kind = cl.spec.kind;
    std::vector<std::pair<int, int>> orient =
        kind == LatticeKind::square ? std::vector<std::pair<int, int>>{{0, 1}} : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}};
    auto step = [&](int v, int s) { return cl.torus.index(cl.torus.cell(v) + bond_vector(kind, s)); };
    for (int v = 0; v < cl.vertex_count(); ++v)
        for (std::size_t o = 0; o < orient.size(); ++o) {
            const auto [sa, sb] = orient[o];
            const int va = step(v, sa), vb = step(v, sb), vab = step(va, sb);
            std::vector<int> verts{v, va, vb, vab};
            std::sort(verts.begin(), verts.end());
            if (std::adjacent_find(verts.begin(), verts.end()) != verts.end()) continue;
            Plaquette p;
            p.vertex = v;
            p.orientation = static_cast<int>(o);
            auto inc = [&](int x, int s) { return cl.incident[static_cast<std::size_t>(x)][static_cast<std::size_t>(s)]; };
            p.pattern_a = {inc(v, sa), inc(vb, sa)};
            p.pattern_b = {inc(v, sb), inc(va, sb)};
            std::vector<int> es{p.pattern_a[0], p.pattern_a[1], p.pattern_b[0], p.pattern_b[1]};
            std::sort(es.begin(), es.end());
            if (std::adjacent_find(es.begin(), es.end()) != es.end()) continue;
            out.push_back(p);
        }
    return out;
}

inline bool contains_edges(const DimerCovering& c, const std::array<int, 2>& e) {
    return std::binary_search(c.begin(), c.end(), e[0]) && std::binary_search(c.begin(), c.end(), e[1]);
}

inline bool is_flippable(const DimerCovering& c, const Plaquette& p) {
    return contains_edges(c, p.pattern_a) || contains_edges(c, p.pattern_b);
}

/// Swaps the plaquette's dimer pair; returns c unchanged if not flippable.
inline DimerCovering flip(const DimerCovering& c, const Plaquette& p) {
    const std::array<int, 2>* from = nullptr;
    const std::array<int, 2>* to = nullptr;
    if (contains_edges(c, p.pattern_a)) {
        from = &p.pattern_a;
        to = &p.pattern_b;
    } else if (contains_edges(c, p.pattern_b)) {
        from = &p.pattern_b;
        to = &p.pattern_a;
    } else {
        return c;
    }
    DimerCovering r;
    for (int e : c)
        if (e != (*from)[0] && e != (*from)[1]) r.push_back(e);
    r.push_back((*to)[0]);
    r.push_back((*to)[1]);
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace rydimer
