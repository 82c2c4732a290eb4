#pragma once

// Sparse operators over a blockade-constrained basis: the Rydberg Hamiltonian
// in the blockade approximation, optional van der Waals tails, and diagonal
// observables.

#include "rydimer/errors.hpp"
#include "rydimer/geometry.hpp"
#include "rydimer/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace rydimer {

/// Real symmetric CSR matrix. Rows sorted by column, no explicit zeros.
struct SparseOperator {
    std::size_t dim = 0;
    std::vector<std::size_t> row_offsets{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> values;

    std::size_t size() const { return dim; }
    std::size_t nnz() const { return values.size(); }

    double at(std::size_t i, std::size_t j) const {
        const auto b = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
        const auto e = cols.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
        auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(j));
        if (it == e || *it != j) return 0.0;
        return values[static_cast<std::size_t>(it - cols.begin())];
    }

    /// y = A x. Rows are independent, so the result does not depend on thread count.
    template <class T>
    void apply(std::span<const T> x, std::span<T> y) const {
        if (x.size() != dim || y.size() != dim) throw DimensionError("operator/vector dimension mismatch");
        const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) if (dim > 20000)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            T acc{};
            for (std::size_t k = row_offsets[static_cast<std::size_t>(i)]; k < row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
                acc += values[k] * x[cols[k]];
            y[static_cast<std::size_t>(i)] = acc;
        }
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) d[i] = at(i, i);
        return d;
    }

    /// Coordinate text export: one "row col value" line per stored entry.
    void write_coo(std::ostream& os) const {
        const auto prec = os.precision(17);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
                os << i << ' ' << cols[k] << ' ' << values[k] << '\n';
        os.precision(prec);
    }
};

template <class T>
std::vector<T> matvec(const SparseOperator& op, std::span<const T> x) {
    std::vector<T> y(x.size());
    op.apply(x, std::span<T>(y));
    return y;
}
template <class T>
std::vector<T> matvec(const SparseOperator& op, const std::vector<T>& x) {
    return matvec(op, std::span<const T>(x));
}

struct TailParams {
    double omega0 = 1.0;            ///< interaction at the blockade radius
    double cutoff_multiplier = 2.0;  ///< tails kept for Rb < d < cutoff * Rb
};

struct HamiltonianParams {
    double omega = 1.0;
    double delta = 1.0;
    double alpha = 1.0;
    std::optional<TailParams> tails;
};

/// Single-atom flip connectivity (sigma^x pattern) plus the diagonal pieces of
/// the Hamiltonian, precomputed once per basis. Any (Omega, Delta, alpha) point
/// is then a cheap recombination.
struct RydbergTerms {
    std::size_t dim = 0;
    std::vector<std::size_t> row_offsets{0};
    std::vector<std::uint32_t> cols;  ///< flip neighbours, sorted per row
    std::vector<std::uint8_t> edge_count;
    std::vector<std::uint8_t> gadget_count;
    std::vector<double> tail_energy;  ///< sum (Rb/d)^6 over excited tail pairs; empty when tails are off
    double tail_omega0 = 0.0;

    std::size_t flips(std::size_t i) const { return row_offsets[i + 1] - row_offsets[i]; }

    /// Diagonal of H for detuning delta, ratio alpha.
    std::vector<double> diagonal(double delta, double alpha) const {
        std::vector<double> d(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = -delta * (edge_count[i] + alpha * gadget_count[i]);
            if (!tail_energy.empty()) d[i] += tail_omega0 * tail_energy[i];
        }
        return d;
    }
};

/// Tail pairs Rb < d < cutoff * Rb (per species-pair Rb), with weight (Rb/d)^6.
struct TailPair {
    int i = 0;
    int j = 0;
    double weight = 0.0;
};

inline std::vector<TailPair> tail_pairs(const AtomArray& arr, const BlockadeRadii& radii, double cutoff_multiplier) {
    if (!arr.is_gadget()) throw ConfigError("interaction tails need a geometric (gadget) array");
    if (!(cutoff_multiplier > 1.0)) throw ConfigError("tail cutoff multiplier must exceed 1");
    std::vector<TailPair> out;
    for (int i = 0; i < arr.size(); ++i)
        for (int j = i + 1; j < arr.size(); ++j) {
            const double rb = radii.for_pair(arr.atoms[static_cast<std::size_t>(i)].species,
                                             arr.atoms[static_cast<std::size_t>(j)].species);
            const double d = arr.distance(i, j);
            if (d > rb * (1.0 + kLengthTolerance) && d < cutoff_multiplier * rb * (1.0 - kLengthTolerance))
                out.push_back({i, j, std::pow(rb / d, 6)});
        }
    return out;
}

inline RydbergTerms build_terms(const AtomArray& arr, const Basis& basis, const BlockadeRadii& radii,
                                const std::optional<TailParams>& tails = std::nullopt) {
    if (basis.n_atoms() != arr.size()) throw DimensionError("basis was built for a different atom array");
    const std::size_t dim = basis.dim();
    const auto& states = basis.states();
    RydbergTerms t;
    t.dim = dim;

    Configuration edge_mask, gadget_mask;
    for (int a = 0; a < arr.size(); ++a)
        (arr.atoms[static_cast<std::size_t>(a)].role == AtomRole::edge ? edge_mask : gadget_mask).set(static_cast<std::size_t>(a));
    t.edge_count.resize(dim);
    t.gadget_count.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        t.edge_count[i] = static_cast<std::uint8_t>((states[i] & edge_mask).count());
        t.gadget_count[i] = static_cast<std::uint8_t>((states[i] & gadget_mask).count());
    }

    // Removing an excitation always stays in the basis and lowers the bitmask,
    // so one pass over set bits yields the strict lower triangle; the upper
    // triangle is its transpose.
    std::vector<std::uint32_t> upper_count(dim, 0);
    std::vector<std::uint32_t> lower_cols;
    std::vector<std::size_t> lower_off(dim + 1, 0);
    for (std::size_t i = 0; i < dim; ++i) lower_off[i + 1] = lower_off[i] + static_cast<std::size_t>(states[i].count());
    lower_cols.resize(lower_off[dim]);
    for (std::size_t i = 0; i < dim; ++i) {
        std::size_t k = lower_off[i];
        states[i].for_each_set([&](std::size_t a) {
            const std::size_t j = basis.find(states[i].flipped(a));
            if (j == dim) throw NotInBasisError("basis is not closed under de-excitation");
            lower_cols[k++] = static_cast<std::uint32_t>(j);
            ++upper_count[j];
        });
    }
    t.row_offsets.assign(dim + 1, 0);
    for (std::size_t i = 0; i < dim; ++i) t.row_offsets[i + 1] = t.row_offsets[i] + (lower_off[i + 1] - lower_off[i]) + upper_count[i];
    t.cols.resize(t.row_offsets[dim]);
    std::vector<std::size_t> fill(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = lower_off[i]; k < lower_off[i + 1]; ++k) {
            t.cols[fill[i]++] = lower_cols[k];
            t.cols[fill[lower_cols[k]]++] = static_cast<std::uint32_t>(i);
        }
    for (std::size_t i = 0; i < dim; ++i)
        std::sort(t.cols.begin() + static_cast<std::ptrdiff_t>(t.row_offsets[i]),
                  t.cols.begin() + static_cast<std::ptrdiff_t>(t.row_offsets[i + 1]));

    if (tails) {
        const auto tp = tail_pairs(arr, radii, tails->cutoff_multiplier);
        std::vector<std::vector<std::pair<int, double>>> by_atom(static_cast<std::size_t>(arr.size()));
        for (const auto& p : tp) by_atom[static_cast<std::size_t>(p.i)].emplace_back(p.j, p.weight);
        t.tail_energy.assign(dim, 0.0);
        t.tail_omega0 = tails->omega0;
        for (std::size_t i = 0; i < dim; ++i) {
            double e = 0.0;
            states[i].for_each_set([&](std::size_t a) {
                for (auto [b, wgt] : by_atom[a])
                    if (states[i].test(static_cast<std::size_t>(b))) e += wgt;
            });
            t.tail_energy[i] = e;
        }
    }
    return t;
}

/// H = Omega * F + D with F the flip pattern and D a diagonal, applied matrix-free.
struct RydbergHamiltonian {
    const RydbergTerms* terms = nullptr;
    double omega = 1.0;
    std::vector<double> diag;

    RydbergHamiltonian() = default;
    RydbergHamiltonian(const RydbergTerms& t, double omega_, double delta, double alpha)
        : terms(&t), omega(omega_), diag(t.diagonal(delta, alpha)) {}

    std::size_t size() const { return terms->dim; }

    template <class T>
    void apply(std::span<const T> x, std::span<T> y) const {
        if (x.size() != terms->dim || y.size() != terms->dim) throw DimensionError("operator/vector dimension mismatch");
        const auto n = static_cast<std::ptrdiff_t>(terms->dim);
        const auto* off = terms->row_offsets.data();
        const auto* cols = terms->cols.data();
#pragma omp parallel for schedule(static) if (n > 20000)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            T acc{};
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) acc += x[cols[k]];
            y[static_cast<std::size_t>(i)] = omega * acc + diag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        }
    }

    SparseOperator to_sparse() const {
        SparseOperator op;
        op.dim = terms->dim;
        op.row_offsets.assign(op.dim + 1, 0);
        for (std::size_t i = 0; i < op.dim; ++i) {
            const auto b = terms->cols.begin() + static_cast<std::ptrdiff_t>(terms->row_offsets[i]);
            const auto e = terms->cols.begin() + static_cast<std::ptrdiff_t>(terms->row_offsets[i + 1]);
            const auto mid = std::lower_bound(b, e, static_cast<std::uint32_t>(i));
            auto push_flips = [&](auto from, auto to) {
                if (omega == 0.0) return;
                for (auto it = from; it != to; ++it) {
                    op.cols.push_back(*it);
                    op.values.push_back(omega);
                }
            };
            push_flips(b, mid);
            if (diag[i] != 0.0) {
                op.cols.push_back(static_cast<std::uint32_t>(i));
                op.values.push_back(diag[i]);
            }
            push_flips(mid, e);
            op.row_offsets[i + 1] = op.values.size();
        }
        return op;
    }
};

/// Assembles the blockaded Rydberg Hamiltonian
///   H = Omega sum_i sigma^x_i - Delta sum_i c_i n_i (+ Omega0 sum_tails (Rb/d)^6 n_i n_j).
inline SparseOperator assemble_hamiltonian(const AtomArray& arr, const Basis& basis, const BlockadeRadii& radii,
                                           const HamiltonianParams& p) {
    if (!(p.omega >= 0.0)) throw ConfigError("Omega must be non-negative");
    const RydbergTerms t = build_terms(arr, basis, radii, p.tails);
    return RydbergHamiltonian(t, p.omega, p.delta, p.alpha).to_sparse();
}

// ---------------------------------------------------------------------------
// Diagonal observables

enum class Observable { edge_density, gadget_density, total_density, violation };

/// 1 iff some vertex has two or more excited edge atoms attached.
inline bool violates_dimer_constraint(const AtomArray& arr, const Configuration& c) {
    const Cluster& cl = arr.cluster;
    for (int v = 0; v < cl.vertex_count(); ++v) {
        int n = 0;
        for (int e : cl.incident[static_cast<std::size_t>(v)])
            if (c.test(static_cast<std::size_t>(arr.edge_atom[static_cast<std::size_t>(e)]))) ++n;
        if (n >= 2) return true;
    }
    return false;
}

inline std::vector<double> diagonal_observable(const AtomArray& arr, const Basis& basis, Observable which) {
    std::vector<double> out(basis.dim(), 0.0);
    Configuration edge_mask, gadget_mask;
    for (int a = 0; a < arr.size(); ++a)
        (arr.atoms[static_cast<std::size_t>(a)].role == AtomRole::edge ? edge_mask : gadget_mask).set(static_cast<std::size_t>(a));
    const double n_edge = arr.count(AtomRole::edge);
    const double n_gad = arr.count(AtomRole::gadget);
    const double n_tot = arr.size();
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const Configuration& s = basis.states()[i];
        switch (which) {
            case Observable::edge_density: out[i] = (s & edge_mask).count() / n_edge; break;
            case Observable::gadget_density: out[i] = n_gad > 0 ? (s & gadget_mask).count() / n_gad : 0.0; break;
            case Observable::total_density: out[i] = s.count() / n_tot; break;
            case Observable::violation: out[i] = violates_dimer_constraint(arr, s) ? 1.0 : 0.0; break;
        }
    }
    return out;
}

/// <psi| diag |psi> for a real or complex state.
template <class T>
double expectation_diagonal(std::span<const T> psi, std::span<const double> diag) {
    if (psi.size() != diag.size()) throw DimensionError("state/observable dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::norm(psi[i]) * diag[i];
    return s;
}

}  // namespace rydimer
