#pragma once

// Ground states along a detuning sweep: energies, dimer-constraint violation,
// fidelity susceptibility, RVB overlap and Rydberg densities.

#include "rydimer/io.hpp"
#include "rydimer/krylov.hpp"
#include "rydimer/model.hpp"

#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace rydimer {

struct Susceptibility {
    double chi = 0.0;
    double overlap = 1.0;  ///< |<a|b>|
    bool flagged = false;  ///< one of the states was degenerate; value not trustworthy
};

/// chi = -(2/dl^2) ln|<a|b>| for unit vectors. The overlap is taken through
/// ||a - b||^2 after sign alignment so that chi stays accurate when 1 - |<a|b>|
/// is far below machine epsilon relative to 1. Orthogonal states give +inf.
inline Susceptibility fidelity_susceptibility(std::span<const double> a, std::span<const double> b, double dl) {
    if (a.size() != b.size()) throw DimensionError("ground states live in different bases");
    if (!(dl > 0.0)) throw ConfigError("delta lambda must be positive");
    const double s = vec::dot(a, b);
    const double sign = s < 0.0 ? -1.0 : 1.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - sign * b[i];
        d2 += d * d;
    }
    Susceptibility r;
    r.overlap = std::abs(s);
    if (d2 >= 2.0 || r.overlap == 0.0) {
        r.chi = std::numeric_limits<double>::infinity();
        return r;
    }
    r.chi = -2.0 / (dl * dl) * std::log1p(-0.5 * d2);
    return r;
}

/// chi at lambda = Delta/Omega with Omega = 1.
inline Susceptibility fidelity_susceptibility(const Model& m, double lambda, double dl, const LanczosOptions& opt = {}) {
    const auto a = ground_state(m.hamiltonian(1.0, lambda), opt);
    const auto b = ground_state(m.hamiltonian(1.0, lambda + dl), opt, a.vector);
    auto r = fidelity_susceptibility(a.vector, b.vector, dl);
    r.flagged = a.degenerate || b.degenerate;
    return r;
}

struct SweepRow {
    double lambda = 0.0;
    double energy = 0.0;
    double p_violation = 0.0;
    double chi = 0.0;
    double rvb_overlap = 0.0;
    double n_edge = 0.0;
    double n_gadget = 0.0;
    double n_total = 0.0;
    double dn_edge = 0.0;
    double dn_gadget = 0.0;
    double dn_total = 0.0;
    double residual = 0.0;
    bool degenerate = false;
    std::string error;  ///< non-empty when the solve failed; numeric fields are NaN
};

struct SweepOptions {
    double delta_lambda = 0.0;  ///< 0: 1e-2 of the grid spacing, floored at 1e-4
    LanczosOptions lanczos{};
};

inline double default_delta_lambda(const std::vector<double>& grid) {
    double spacing = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) spacing = std::max(spacing, grid[i] - grid[i - 1]);
    return std::max(1e-2 * spacing, 1e-4);
}

/// Evenly spaced grid lo, lo+step, ... up to hi (inclusive within rounding).
inline std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw ConfigError("grid needs step > 0 and hi >= lo");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
}

/// Central differences on a non-uniform grid, one-sided at the ends.
inline std::vector<double> grid_derivative(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 2) return d;
    d[0] = (y[1] - y[0]) / (x[1] - x[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
    return d;
}

inline std::vector<SweepRow> sweep(const Model& m, const std::vector<double>& grid, const SweepOptions& opt = {}) {
    if (grid.empty()) throw ConfigError("empty lambda grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("lambda grid must be ascending");
    const double dl = opt.delta_lambda > 0.0 ? opt.delta_lambda : default_delta_lambda(grid);
    const auto viol = diagonal_observable(m.array, m.basis, Observable::violation);
    const auto ne = diagonal_observable(m.array, m.basis, Observable::edge_density);
    const auto ng = diagonal_observable(m.array, m.basis, Observable::gadget_density);
    const auto nt = diagonal_observable(m.array, m.basis, Observable::total_density);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<SweepRow> rows;
    std::vector<double> prev;
    for (double lam : grid) {
        SweepRow row;
        row.lambda = lam;
        try {
            auto a = ground_state(m.hamiltonian(1.0, lam), opt.lanczos, prev);
            if (!prev.empty() && vec::dot(prev, a.vector) < 0.0)
                for (auto& x : a.vector) x = -x;
            const auto b = ground_state(m.hamiltonian(1.0, lam + dl), opt.lanczos, a.vector);
            const auto chi = fidelity_susceptibility(a.vector, b.vector, dl);
            row.energy = a.energy;
            row.residual = a.residual;
            row.degenerate = a.degenerate || b.degenerate;
            row.chi = chi.chi;
            row.p_violation = expectation_diagonal<double>(a.vector, viol);
            row.rvb_overlap = m.coverings.empty() ? nan : rvb_overlap<double>(a.vector, m.rvb);
            row.n_edge = expectation_diagonal<double>(a.vector, ne);
            row.n_gadget = expectation_diagonal<double>(a.vector, ng);
            row.n_total = expectation_diagonal<double>(a.vector, nt);
            prev = std::move(a.vector);
        } catch (const NumericalError& e) {
            row.error = e.what();
            row.energy = row.p_violation = row.chi = row.rvb_overlap = nan;
            row.n_edge = row.n_gadget = row.n_total = nan;
            row.residual = e.residual();
        }
        rows.push_back(std::move(row));
    }

    std::vector<double> x, e, g, t;
    for (const auto& r : rows) {
        x.push_back(r.lambda);
        e.push_back(r.n_edge);
        g.push_back(r.n_gadget);
        t.push_back(r.n_total);
    }
    const auto de = grid_derivative(x, e), dg = grid_derivative(x, g), dt = grid_derivative(x, t);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].dn_edge = de[i];
        rows[i].dn_gadget = dg[i];
        rows[i].dn_total = dt[i];
    }
    return rows;
}

inline constexpr const char* kSweepColumns =
    "lambda,energy,p_violation,chi,rvb_overlap,n_edge,n_gadget,n_total,dn_edge,dn_gadget,dn_total";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepColumns << '\n';
    for (const auto& r : rows)
        os << fmt(r.lambda) << ',' << fmt(r.energy) << ',' << fmt(r.p_violation) << ',' << fmt(r.chi) << ','
           << fmt(r.rvb_overlap) << ',' << fmt(r.n_edge) << ',' << fmt(r.n_gadget) << ',' << fmt(r.n_total) << ','
           << fmt(r.dn_edge) << ',' << fmt(r.dn_gadget) << ',' << fmt(r.dn_total) << '\n';
}

/// Named column of a sweep table.
inline std::vector<double> sweep_column(const std::vector<SweepRow>& rows, const std::string& name) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (name == "lambda") out.push_back(r.lambda);
        else if (name == "energy") out.push_back(r.energy);
        else if (name == "p_violation") out.push_back(r.p_violation);
        else if (name == "chi") out.push_back(r.chi);
        else if (name == "rvb_overlap") out.push_back(r.rvb_overlap);
        else if (name == "n_edge") out.push_back(r.n_edge);
        else if (name == "n_gadget") out.push_back(r.n_gadget);
        else if (name == "n_total") out.push_back(r.n_total);
        else if (name == "dn_edge") out.push_back(r.dn_edge);
        else if (name == "dn_gadget") out.push_back(r.dn_gadget);
        else if (name == "dn_total") out.push_back(r.dn_total);
        else throw ConfigError("unknown sweep column '" + name + "'");
    }
    return out;
}

/// Strict interior local maxima, optionally after a 3-point moving average.
inline int peak_count(std::vector<double> v, bool smooth = false) {
    if (v.size() < 5) throw ConfigError("peak_count needs at least 5 points");
    if (smooth) {
        std::vector<double> s = v;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) s[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
        v = std::move(s);
    }
    int n = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++n;
    return n;
}

inline int peak_count(const std::vector<SweepRow>& rows, const std::string& column, bool smooth = false) {
    return peak_count(sweep_column(rows, column), smooth);
}

}  // namespace rydimer
