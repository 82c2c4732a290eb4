#pragma once

// Everything derived from one (lattice spec, alpha, radii) point: atoms,
// blockade graph, basis, coverings, RVB state and Hamiltonian terms.

#include "rydimer/dimer.hpp"
#include "rydimer/geometry.hpp"
#include "rydimer/hilbert.hpp"
#include "rydimer/operators.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>

namespace rydimer {

struct ModelOptions {
    std::optional<BlockadeRadii> radii;  ///< default_radii(spec) when unset
    std::optional<TailParams> tails;
    std::size_t dimension_cap = kDefaultDimensionCap;
    std::filesystem::path cache_dir;  ///< empty: no basis cache
};

struct Model {
    AtomArray array;
    BlockadeRadii radii;
    ConflictGraph graph;
    Basis basis;
    std::vector<DimerCovering> coverings;
    RvbVector rvb;
    RydbergTerms terms;
    bool basis_from_cache = false;

    const LatticeSpec& spec() const { return array.spec(); }
    double alpha() const { return array.alpha; }
    std::size_t dim() const { return basis.dim(); }

    RydbergHamiltonian hamiltonian(double omega, double delta) const { return {terms, omega, delta, array.alpha}; }
};

inline std::filesystem::path basis_cache_path(const std::filesystem::path& dir, const ConflictGraph& g) {
    char name[40];
    std::snprintf(name, sizeof name, "basis-%016llx.bin", static_cast<unsigned long long>(g.content_hash()));
    return dir / name;
}

/// Loads the cached basis when it exists and is valid for `g`; otherwise
/// enumerates and (if a directory is given) writes it.
inline Basis cached_basis(const ConflictGraph& g, const std::filesystem::path& dir, std::size_t cap, bool* hit = nullptr) {
    if (hit) *hit = false;
    if (dir.empty()) return enumerate_basis(g, cap);
    const auto path = basis_cache_path(dir, g);
    if (std::filesystem::exists(path)) {
        try {
            Basis b = load_basis(path, g);
            if (b.dim() > cap) throw CapacityError(cap, "cached basis");
            if (hit) *hit = true;
            return b;
        } catch (const CacheInvalidError&) {
            // stale or corrupt; rebuild below
        }
    }
    Basis b = enumerate_basis(g, cap);
    std::filesystem::create_directories(dir);
    save_basis(b, path);
    return b;
}

inline Model build_model(const LatticeSpec& spec, double alpha, const ModelOptions& opt = {}) {
    spec.validate();
    Model m;
    m.array = build_array(spec, alpha);
    m.radii = opt.radii.value_or(default_radii(spec));
    m.graph = conflict_graph(m.array, m.radii);
    m.basis = cached_basis(m.graph, opt.cache_dir, opt.dimension_cap, &m.basis_from_cache);
    m.coverings = enumerate_coverings(m.array.cluster);
    if (!m.coverings.empty()) m.rvb = rvb_vector(m.basis, m.coverings, m.array);
    m.terms = build_terms(m.array, m.basis, m.radii, opt.tails);
    return m;
}

}  // namespace rydimer
