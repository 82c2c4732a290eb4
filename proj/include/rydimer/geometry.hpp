#pragma once

// Periodic atom arrays for the diluted and gadget dimer models on the
// square and triangular lattices. Lengths are in units of the lattice
// spacing a.

#include "rydimer/bits.hpp"
#include "rydimer/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace rydimer {

enum class LatticeKind { square, triangular };
enum class DimerModel { diluted, gadget };
enum class AtomRole { edge, gadget };

inline const char* to_string(LatticeKind k) { return k == LatticeKind::square ? "square" : "triangular"; }
inline const char* to_string(DimerModel m) { return m == DimerModel::diluted ? "diluted" : "gadget"; }
inline const char* to_string(AtomRole r) { return r == AtomRole::edge ? "edge" : "gadget"; }

struct Vec2i {
    long x = 0;
    long y = 0;
    friend constexpr Vec2i operator+(Vec2i a, Vec2i b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2i operator-(Vec2i a, Vec2i b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr bool operator==(Vec2i, Vec2i) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    double norm() const { return std::hypot(x, y); }
};

/// Relative tolerance on every length comparison (atoms exactly on a blockade sphere).
inline constexpr double kLengthTolerance = 1e-9;

/// Number of bond directions per vertex in the positive half-plane (edges per unit cell).
constexpr int bond_directions(LatticeKind k) { return k == LatticeKind::square ? 2 : 3; }

/// Bond direction k in primitive coordinates. Directions k >= bond_directions are the negatives.
inline Vec2i bond_vector(LatticeKind kind, int k) {
    static constexpr std::array<Vec2i, 2> sq{{{1, 0}, {0, 1}}};
    static constexpr std::array<Vec2i, 3> tri{{{1, 0}, {0, 1}, {-1, 1}}};
    const int nd = bond_directions(kind);
    const int base = k % nd;
    Vec2i v = kind == LatticeKind::square ? sq[base] : tri[base];
    if (k >= nd) v = Vec2i{-v.x, -v.y};
    return v;
}

/// Primitive coordinates -> Cartesian (a1 = (1,0); a2 = (0,1) or (1/2, sqrt(3)/2)).
inline Vec2 to_cartesian(LatticeKind kind, double u, double v) {
    if (kind == LatticeKind::square) return {u, v};
    return {u + 0.5 * v, v * std::sqrt(3.0) / 2.0};
}
inline Vec2 to_cartesian(LatticeKind kind, Vec2i p) {
    return to_cartesian(kind, static_cast<double>(p.x), static_cast<double>(p.y));
}

struct LatticeSpec {
    LatticeKind kind = LatticeKind::square;
    DimerModel model = DimerModel::gadget;
    Vec2i span1{2, 0};
    Vec2i span2{0, 2};
    double gadget_offset = 1.0 / 6.0;  ///< r, distance of gadget atoms from their vertex
    int species_count = 1;             ///< 1, or one species per bond axis

    long determinant() const { return span1.x * span2.y - span1.y * span2.x; }
    long cell_count() const { return std::labs(determinant()); }

    /// Throws GeometryError listing every violated invariant.
    void validate() const {
        std::string msg;
        if (determinant() == 0) msg += "span vectors are degenerate (det = 0); ";
        if (model == DimerModel::gadget && !(gadget_offset > 0.0 && gadget_offset < 0.5))
            msg += "gadget offset r must satisfy 0 < r < a/2; ";
        if (species_count != 1 && species_count != bond_directions(kind))
            msg += "species_count must be 1 or " + std::to_string(bond_directions(kind)) + "; ";
        if (!msg.empty()) throw GeometryError(msg.substr(0, msg.size() - 2));
    }
};

/// Periodic identification of lattice points modulo the span lattice.
class Torus {
  public:
    Torus() = default;
    Torus(LatticeKind kind, Vec2i s1, Vec2i s2) : kind_(kind), s1_(s1), s2_(s2) {
        det_ = s1.x * s2.y - s1.y * s2.x;
        if (det_ == 0) throw GeometryError("degenerate torus");
        t1_ = to_cartesian(kind, s1);
        t2_ = to_cartesian(kind, s2);
        const long lox = std::min({0L, s1.x, s2.x, s1.x + s2.x});
        const long hix = std::max({0L, s1.x, s2.x, s1.x + s2.x});
        const long loy = std::min({0L, s1.y, s2.y, s1.y + s2.y});
        const long hiy = std::max({0L, s1.y, s2.y, s1.y + s2.y});
        std::map<std::pair<long, long>, Vec2i> reps;
        for (long y = loy; y <= hiy; ++y)
            for (long x = lox; x <= hix; ++x) {
                auto k = key({x, y});
                if (!reps.count(k)) reps.emplace(k, representative(k));
            }
        for (auto& [k, p] : reps) cells_.push_back(p);
        std::sort(cells_.begin(), cells_.end(),
                  [](Vec2i a, Vec2i b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
        for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(key(cells_[i]), static_cast<int>(i));
    }

    int size() const { return static_cast<int>(cells_.size()); }
    Vec2i cell(int i) const { return cells_[static_cast<std::size_t>(i)]; }
    int index(Vec2i p) const { return index_.at(key(p)); }
    Vec2 vector1() const { return t1_; }
    Vec2 vector2() const { return t2_; }

    /// Shortest periodic image of a Cartesian displacement.
    Vec2 min_image(Vec2 d) const {
        double f1 = 0, f2 = 0;
        fractional(d, f1, f2);
        f1 -= std::round(f1);
        f2 -= std::round(f2);
        const Vec2 base = f1 * t1_ + f2 * t2_;
        Vec2 best = base;
        double bn = base.norm();
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                Vec2 c = base + static_cast<double>(i) * t1_ + static_cast<double>(j) * t2_;
                if (c.norm() < bn - 1e-15) {
                    bn = c.norm();
                    best = c;
                }
            }
        return best;
    }

    double distance(Vec2 a, Vec2 b) const { return min_image(a - b).norm(); }

    /// Maps a point into the fundamental parallelogram spanned by the torus vectors.
    Vec2 wrap(Vec2 p) const {
        double f1 = 0, f2 = 0;
        fractional(p, f1, f2);
        auto fr = [](double f) {
            double r = f - std::floor(f);
            if (r >= 1.0 - 1e-12) r = 0.0;
            return r;
        };
        return fr(f1) * t1_ + fr(f2) * t2_;
    }

  private:
    void fractional(Vec2 d, double& f1, double& f2) const {
        const double det = t1_.x * t2_.y - t1_.y * t2_.x;
        f1 = (d.x * t2_.y - d.y * t2_.x) / det;
        f2 = (t1_.x * d.y - t1_.y * d.x) / det;
    }

    std::pair<long, long> key(Vec2i p) const {
        long d = det_;
        long c1 = s2_.y * p.x - s2_.x * p.y;
        long c2 = -s1_.y * p.x + s1_.x * p.y;
        if (d < 0) {
            d = -d;
            c1 = -c1;
            c2 = -c2;
        }
        return {((c1 % d) + d) % d, ((c2 % d) + d) % d};
    }

    Vec2i representative(std::pair<long, long> k) const {
        long d = det_;
        long k1 = k.first, k2 = k.second;
        if (d < 0) {
            d = -d;
            k1 = -k1;
            k2 = -k2;
        }
        // M * (k / d), exact in integers
        return {(s1_.x * k1 + s2_.x * k2) / d, (s1_.y * k1 + s2_.y * k2) / d};
    }

    LatticeKind kind_ = LatticeKind::square;
    Vec2i s1_{}, s2_{};
    long det_ = 0;
    Vec2 t1_{}, t2_{};
    std::vector<Vec2i> cells_;
    std::map<std::pair<long, long>, int> index_;
};

/// Lattice edge, oriented from `tail` along positive bond direction `direction`.
struct Edge {
    int tail = 0;
    int head = 0;
    int direction = 0;
};

/// Vertex/edge incidence structure of a periodic cluster.
struct Cluster {
    LatticeSpec spec;
    Torus torus;
    std::vector<Edge> edges;
    /// incident[v][k]: edge leaving v along signed direction k (0 <= k < 2*nd).
    std::vector<std::vector<int>> incident;

    int vertex_count() const { return torus.size(); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int directions() const { return bond_directions(spec.kind); }

    static Cluster build(const LatticeSpec& spec) {
        spec.validate();
        Cluster c;
        c.spec = spec;
        c.torus = Torus(spec.kind, spec.span1, spec.span2);
        const int nd = bond_directions(spec.kind);
        const int nv = c.torus.size();
        c.edges.reserve(static_cast<std::size_t>(nv * nd));
        for (int v = 0; v < nv; ++v)
            for (int k = 0; k < nd; ++k) {
                // period 1 along k gives a self-loop (tail == head)
                const int w = c.torus.index(c.torus.cell(v) + bond_vector(spec.kind, k));
                c.edges.push_back({v, w, k});
            }
        c.incident.assign(static_cast<std::size_t>(nv), std::vector<int>(static_cast<std::size_t>(2 * nd), -1));
        for (int e = 0; e < c.edge_count(); ++e) {
            const Edge& ed = c.edges[static_cast<std::size_t>(e)];
            c.incident[static_cast<std::size_t>(ed.tail)][static_cast<std::size_t>(ed.direction)] = e;
            c.incident[static_cast<std::size_t>(ed.head)][static_cast<std::size_t>(ed.direction + nd)] = e;
        }
        return c;
    }
};

struct Atom {
    Vec2 position;  ///< wrapped into the fundamental torus cell
    AtomRole role = AtomRole::edge;
    int species = 0;
    int cell = 0;
    int vertex_id = -1;  ///< gadget atoms
    int edge_id = -1;    ///< edge atoms
    int direction = 0;   ///< bond direction (edge) or signed direction the gadget atom points to
    double detuning_coeff = 1.0;
};

struct AtomArray {
    Cluster cluster;
    std::vector<Atom> atoms;
    double alpha = 1.0;
    std::vector<int> edge_atom;                 ///< edge id -> atom id
    std::vector<std::vector<int>> gadget_atom;  ///< vertex -> signed direction -> atom id (gadget model)

    int size() const { return static_cast<int>(atoms.size()); }
    const LatticeSpec& spec() const { return cluster.spec; }
    bool is_gadget() const { return cluster.spec.model == DimerModel::gadget; }
    int count(AtomRole role) const {
        return static_cast<int>(std::count_if(atoms.begin(), atoms.end(), [&](const Atom& a) { return a.role == role; }));
    }
    double distance(int i, int j) const {
        return cluster.torus.distance(atoms[static_cast<std::size_t>(i)].position,
                                      atoms[static_cast<std::size_t>(j)].position);
    }
};

/// Builds the atom array. Ordering: by unit cell, then edge atoms before gadget atoms,
/// then local direction index.
inline AtomArray build_array(const LatticeSpec& spec, double alpha) {
    if (spec.model == DimerModel::gadget && !(alpha > 0.0)) throw GeometryError("alpha must be positive");
    AtomArray arr;
    arr.cluster = Cluster::build(spec);
    arr.alpha = alpha;
    const Cluster& cl = arr.cluster;
    const int nd = cl.directions();
    const int nv = cl.vertex_count();
    const bool gadget = spec.model == DimerModel::gadget;
    const double r = spec.gadget_offset;
    arr.edge_atom.assign(static_cast<std::size_t>(cl.edge_count()), -1);
    if (gadget) arr.gadget_atom.assign(static_cast<std::size_t>(nv), std::vector<int>(static_cast<std::size_t>(2 * nd), -1));

    auto species_of = [&](int dir) { return spec.species_count == 1 ? 0 : dir % nd; };
    for (int v = 0; v < nv; ++v) {
        const Vec2i p = cl.torus.cell(v);
        const Vec2 origin = to_cartesian(spec.kind, p);
        for (int k = 0; k < nd; ++k) {
            const int e = cl.incident[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
            Atom a;
            a.role = AtomRole::edge;
            a.cell = v;
            a.edge_id = e;
            a.direction = k;
            a.species = species_of(k);
            a.detuning_coeff = 1.0;
            a.position = cl.torus.wrap(origin + 0.5 * to_cartesian(spec.kind, bond_vector(spec.kind, k)));
            arr.edge_atom[static_cast<std::size_t>(e)] = static_cast<int>(arr.atoms.size());
            arr.atoms.push_back(a);
        }
        if (!gadget) continue;
        for (int k = 0; k < 2 * nd; ++k) {
            Atom a;
            a.role = AtomRole::gadget;
            a.cell = v;
            a.vertex_id = v;
            a.direction = k;
            a.species = species_of(k);
            a.detuning_coeff = alpha;
            const Vec2 dir = to_cartesian(spec.kind, bond_vector(spec.kind, k));
            a.position = cl.torus.wrap(origin + (r / dir.norm()) * dir);
            arr.gadget_atom[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] = static_cast<int>(arr.atoms.size());
            arr.atoms.push_back(a);
        }
    }
    for (int i = 0; i < arr.size(); ++i)
        for (int j = i + 1; j < arr.size(); ++j)
            if (arr.distance(i, j) < kLengthTolerance)
                throw GeometryError("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide on the torus");
    return arr;
}

// ---------------------------------------------------------------------------
// Blockade windows

/// Which pair of species a blockade radius applies to.
enum class PairClass { single_species, intra_species, inter_species };

struct BlockadeWindow {
    double r_min = 0.0;
    double r_max = 0.0;
    double ratio = 0.0;  ///< (r_max / r_min)^6 = U(r_min) / U(r_max)
    double midpoint() const { return 0.5 * (r_min + r_max); }
    bool contains(double rb) const { return rb > r_min && rb < r_max; }
};

/// Interval of blockade radii for which the gadget geometry realizes the dimer
/// constraint, for gadget offset r (units of a).
inline BlockadeWindow blockade_window(LatticeKind kind, double r, PairClass pair = PairClass::single_species) {
    if (!(r > 0.0 && r < 0.5)) throw GeometryError("gadget offset must satisfy 0 < r < a/2");
    const double s3 = std::sqrt(3.0);
    BlockadeWindow w;
    switch (pair) {
        case PairClass::single_species:
            w.r_min = kind == LatticeKind::square ? std::sqrt(r * r + 0.25)
                                                  : 0.5 * std::sqrt(r * r + (1.0 + s3 * r) * (1.0 + s3 * r));
            w.r_max = std::min(1.0 - 2.0 * r, r + 0.5);
            break;
        case PairClass::intra_species:
            w.r_min = std::max(2.0 * r, 0.5 - r);
            w.r_max = 0.5 + r;
            break;
        case PairClass::inter_species:
            if (kind == LatticeKind::square) {
                w.r_min = std::sqrt(r * r + 0.25);
                w.r_max = std::sqrt((1.0 - r) * (1.0 - r) + 0.25);
            } else {
                w.r_min = 0.5 * std::sqrt(r * r + (1.0 + s3 * r) * (1.0 + s3 * r));
                w.r_max = 0.5 * std::sqrt(r * r + 3.0 * (1.0 - r) * (1.0 - r));
            }
            break;
    }
    if (!(w.r_min < w.r_max)) throw InfeasibleWindowError(w.r_min, w.r_max);
    w.ratio = std::pow(w.r_max / w.r_min, 6);
    return w;
}

/// Blockade radii per species pair. With one species only `intra` is used.
struct BlockadeRadii {
    double intra = 0.0;
    double inter = 0.0;
    double for_pair(int si, int sj) const { return si == sj ? intra : inter; }
    double largest() const { return std::max(intra, inter); }
};

/// Default radii: window midpoint for a single species; the published
/// multi-species settings otherwise (the inter-species window formula does
/// not exclude edge-edge pairs, so its midpoint is not usable).
inline BlockadeRadii default_radii(const LatticeSpec& spec) {
    if (spec.model == DimerModel::diluted) return {1.0, 1.0};
    if (spec.species_count == 1) {
        const double rb = blockade_window(spec.kind, spec.gadget_offset).midpoint();
        return {rb, rb};
    }
    return spec.kind == LatticeKind::square ? BlockadeRadii{0.45, 0.60} : BlockadeRadii{0.45, 0.62};
}

// ---------------------------------------------------------------------------
// Conflict graph

struct ConflictGraph {
    int n_atoms = 0;
    std::vector<std::pair<int, int>> pairs;  ///< sorted, i < j
    std::vector<std::vector<int>> neighbors;
    std::vector<Configuration> masks;  ///< neighbor bitmask per atom

    bool adjacent(int i, int j) const {
        const auto& nb = neighbors[static_cast<std::size_t>(i)];
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    bool is_independent(const Configuration& c) const {
        bool ok = true;
        c.for_each_set([&](std::size_t i) {
            if (ok && c.intersects(masks[i])) ok = false;
        });
        return ok;
    }

    /// FNV-1a over the atom count and sorted pair list.
    std::uint64_t content_hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t x) {
            for (int b = 0; b < 8; ++b) {
                h ^= (x >> (8 * b)) & 0xffu;
                h *= 1099511628211ull;
            }
        };
        mix(static_cast<std::uint64_t>(n_atoms));
        for (auto [i, j] : pairs) {
            mix(static_cast<std::uint64_t>(i));
            mix(static_cast<std::uint64_t>(j));
        }
        return h;
    }

    static ConflictGraph from_pairs(int n, std::vector<std::pair<int, int>> p) {
        if (n > static_cast<int>(Configuration::capacity))
            throw GeometryError("cluster has " + std::to_string(n) + " atoms; at most " +
                                std::to_string(Configuration::capacity) + " supported");
        ConflictGraph g;
        g.n_atoms = n;
        for (auto& [i, j] : p) {
            if (i == j) throw GeometryError("conflict graph must be irreflexive");
            if (i > j) std::swap(i, j);
        }
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        g.pairs = std::move(p);
        g.neighbors.assign(static_cast<std::size_t>(n), {});
        g.masks.assign(static_cast<std::size_t>(n), Configuration{});
        for (auto [i, j] : g.pairs) {
            g.neighbors[static_cast<std::size_t>(i)].push_back(j);
            g.neighbors[static_cast<std::size_t>(j)].push_back(i);
            g.masks[static_cast<std::size_t>(i)].set(static_cast<std::size_t>(j));
            g.masks[static_cast<std::size_t>(j)].set(static_cast<std::size_t>(i));
        }
        for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
        return g;
    }
};

/// Blockade relation. Diluted model: two edges conflict iff they share a vertex.
/// Gadget model: minimum-image distance below the species-pair radius.
inline ConflictGraph conflict_graph(const AtomArray& arr, const BlockadeRadii& radii) {
    std::vector<std::pair<int, int>> pairs;
    const int n = arr.size();
    if (!arr.is_gadget()) {
        const auto& edges = arr.cluster.edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const Edge& a = edges[static_cast<std::size_t>(arr.atoms[static_cast<std::size_t>(i)].edge_id)];
                const Edge& b = edges[static_cast<std::size_t>(arr.atoms[static_cast<std::size_t>(j)].edge_id)];
                if (a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head)
                    pairs.emplace_back(i, j);
            }
        return ConflictGraph::from_pairs(n, std::move(pairs));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double rb = radii.for_pair(arr.atoms[static_cast<std::size_t>(i)].species,
                                             arr.atoms[static_cast<std::size_t>(j)].species);
            if (arr.distance(i, j) < rb * (1.0 + kLengthTolerance)) pairs.emplace_back(i, j);
        }
    return ConflictGraph::from_pairs(n, std::move(pairs));
}

/// Checks that a gadget-model conflict graph has the intended structure:
/// gadgets are cliques, an edge atom blockades every gadget atom at its two
/// endpoints except the one pointing away, gadgets do not talk to each other
/// or to non-incident edges, and edge atoms blockade exactly the edges at 60
/// degrees (triangular) or none (square). Returns one message per violation.
inline std::vector<std::string> gadget_structure_violations(const AtomArray& arr, const ConflictGraph& g) {
    std::vector<std::string> out;
    if (!arr.is_gadget()) return out;
    const Cluster& cl = arr.cluster;
    const int nd = cl.directions();
    auto expected = [&](int i, int j) -> bool {
        const Atom& a = arr.atoms[static_cast<std::size_t>(i)];
        const Atom& b = arr.atoms[static_cast<std::size_t>(j)];
        if (a.role == AtomRole::gadget && b.role == AtomRole::gadget) return a.vertex_id == b.vertex_id;
        if (a.role == AtomRole::edge && b.role == AtomRole::edge) {
            if (cl.spec.kind == LatticeKind::square) return false;
            const Edge& ea = cl.edges[static_cast<std::size_t>(a.edge_id)];
            // 60-degree neighbours: signed directions at a shared vertex differ by +-1 (mod 6)
            for (int va : {ea.tail, ea.head})
                for (int ka = 0; ka < 2 * nd; ++ka) {
                    if (cl.incident[static_cast<std::size_t>(va)][static_cast<std::size_t>(ka)] != a.edge_id) continue;
                    for (int s : {1, 2 * nd - 1}) {
                        if (cl.incident[static_cast<std::size_t>(va)][static_cast<std::size_t>((ka + s) % (2 * nd))] == b.edge_id)
                            return true;
                    }
                }
            return false;
        }
        const Atom& e = a.role == AtomRole::edge ? a : b;
        const Atom& q = a.role == AtomRole::edge ? b : a;
        const auto& inc = cl.incident[static_cast<std::size_t>(q.vertex_id)];
        for (int k = 0; k < 2 * nd; ++k)
            if (inc[static_cast<std::size_t>(k)] == e.edge_id && q.direction != (k + nd) % (2 * nd)) return true;
        return false;
    };
    for (int i = 0; i < arr.size(); ++i)
        for (int j = i + 1; j < arr.size(); ++j) {
            const bool want = expected(i, j);
            const bool have = g.adjacent(i, j);
            if (want != have)
                out.push_back("atoms " + std::to_string(i) + "," + std::to_string(j) +
                              (want ? " should be blockaded (d=" : " should not be blockaded (d=") +
                              std::to_string(arr.distance(i, j)) + ")");
        }
    return out;
}

// ---------------------------------------------------------------------------
// Classical limit

/// Minimum detuning ratio for which fully-packed coverings are the classical ground space.
constexpr double alpha_threshold(LatticeKind kind) { return kind == LatticeKind::square ? 1.5 : 1.0; }

/// -delta * sum_i c_i n_i with c = 1 on edges and alpha on gadgets.
inline double classical_energy(const AtomArray& arr, const ConflictGraph& g, const Configuration& occ, double delta,
                               double alpha) {
    if (!g.is_independent(occ)) throw ConstraintError("occupation violates the blockade constraint");
    double sum = 0.0;
    occ.for_each_set([&](std::size_t i) {
        if (i >= arr.atoms.size()) throw ConstraintError("occupation has bits beyond the atom count");
        sum += arr.atoms[i].role == AtomRole::edge ? 1.0 : alpha;
    });
    return -delta * sum;
}

// ---------------------------------------------------------------------------
// Export

inline void write_atoms_csv(std::ostream& os, const AtomArray& arr) {
    const auto prec = os.precision(17);
    os << "atom_id,x,y,role,species,vertex_id,edge_id,detuning_coeff\n";
    for (int i = 0; i < arr.size(); ++i) {
        const Atom& a = arr.atoms[static_cast<std::size_t>(i)];
        os << i << ',' << a.position.x << ',' << a.position.y << ',' << to_string(a.role) << ',' << a.species << ','
           << a.vertex_id << ',' << a.edge_id << ',' << a.detuning_coeff << '\n';
    }
    os.precision(prec);
}

}  // namespace rydimer
