#pragma once

// Three-segment annealing schedule, Krylov time evolution from the all-ground
// state, and RVB preparation infidelity scans.

#include "rydimer/io.hpp"
#include "rydimer/krylov.hpp"
#include "rydimer/model.hpp"

#include <chrono>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

namespace rydimer {

enum class RampShape { linear };

/// Omega ramps 0 -> omega0 on [0, T1], holds on [T1, T1+T2], ramps back to 0 on
/// the last segment. Delta holds delta0, ramps to delta_f during the middle
/// segment, then holds.
struct Schedule {
    double total = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double omega0 = 1.0;
    double delta0 = -5.0;
    double delta_f = 1.5;
    RampShape shape = RampShape::linear;

    double omega(double t) const {
        if (t <= 0.0 || t >= total) return 0.0;
        if (t < t1) return omega0 * t / t1;
        if (t <= t1 + t2) return omega0;
        return omega0 * (total - t) / t3;
    }

    double delta(double t) const {
        if (t <= t1) return delta0;
        if (t >= t1 + t2) return delta_f;
        return delta0 + (delta_f - delta0) * (t - t1) / t2;
    }
};

inline Schedule make_schedule(double T, double delta0 = -5.0, double delta_f = 1.5) {
    if (!(T > 0.0)) throw ConfigError("total time must be positive");
    Schedule s;
    s.total = T;
    s.t1 = 0.25 * T;
    s.t2 = 0.5 * T;
    s.t3 = T - s.t1 - s.t2;
    s.delta0 = delta0;
    s.delta_f = delta_f;
    return s;
}

/// midpoint: one exponential of H frozen at the step midpoint (second order).
/// magnus4: commutator-free fourth-order Magnus, two exponentials of linear
/// combinations of H at the Gauss nodes.
enum class Integrator { midpoint, magnus4 };

struct EvolveOptions {
    double dt = 0.0;          ///< 0: T/2000
    Integrator integrator = Integrator::magnus4;
    double step_tol = 1e-9;   ///< Krylov error per step
    int krylov_dim = 40;
    int max_halvings = 8;     ///< per step, on Krylov failure
    double norm_tol = 1e-8;   ///< per-step norm error allowed before renormalizing
};

struct EvolvedState {
    std::vector<std::complex<double>> psi;
    double wall_seconds = 0.0;
    long steps = 0;
    long matvecs = 0;
    double norm_drift = 0.0;  ///< sum over steps of | ||psi|| - 1 | removed by renormalization
};

/// Index of the empty configuration, the Omega = 0, Delta < 0 ground state.
inline std::size_t all_ground_index(const Basis& b) { return b.index_of(Configuration{}); }

/// Evolves |psi0> (default: all atoms in the ground state) under the schedule.
inline EvolvedState evolve(const Model& m, const Schedule& s, const EvolveOptions& opt = {},
                           std::vector<std::complex<double>> psi0 = {}) {
    using cd = std::complex<double>;
    const auto t_start = std::chrono::steady_clock::now();
    EvolvedState out;
    if (psi0.empty()) {
        out.psi.assign(m.dim(), cd(0.0));
        out.psi[all_ground_index(m.basis)] = 1.0;
    } else {
        if (psi0.size() != m.dim()) throw DimensionError("initial state dimension mismatch");
        out.psi = std::move(psi0);
    }
    const double dt = opt.dt > 0.0 ? opt.dt : s.total / 2000.0;
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(s.total / dt - 1e-9)));
    const double h = s.total / static_cast<double>(n_steps);
    std::vector<std::vector<cd>> work;
    std::vector<cd> backup;
    RydbergHamiltonian H(m.terms, 0.0, 0.0, m.alpha());

    // Frozen generator c_a H(ta) + c_b H(tb); H is linear in (Omega, Delta).
    auto freeze = [&](double ta, double ca, double tb, double cb) {
        H.omega = ca * s.omega(ta) + cb * s.omega(tb);
        H.diag = m.terms.diagonal(ca * s.delta(ta) + cb * s.delta(tb), m.alpha());
    };
    auto exp_step = [&](double len, KrylovStepStats& st) {
        const bool ok = krylov_expm_step(H, std::span<cd>(out.psi), len, opt.step_tol, opt.krylov_dim, &st, &work);
        if (ok) out.matvecs += st.krylov_dim;
        return ok;
    };
    auto advance = [&](double t0, double len, int depth, auto& self) -> void {
        KrylovStepStats st;
        backup = out.psi;
        bool ok = false;
        if (opt.integrator == Integrator::midpoint) {
            freeze(t0 + 0.5 * len, 1.0, t0, 0.0);
            ok = exp_step(len, st);
        } else {
            const double r3 = std::sqrt(3.0);
            const double ta = t0 + (0.5 - r3 / 6.0) * len, tb = t0 + (0.5 + r3 / 6.0) * len;
            const double c1 = (3.0 - 2.0 * r3) / 12.0, c2 = (3.0 + 2.0 * r3) / 12.0;
            freeze(ta, c2, tb, c1);
            ok = exp_step(len, st);
            if (ok) {
                freeze(ta, c1, tb, c2);
                ok = exp_step(len, st);
            }
        }
        if (ok) {
            ++out.steps;
            return;
        }
        out.psi = backup;
        if (depth >= opt.max_halvings)
            throw NumericalError("Krylov step failed after " + std::to_string(depth) + " halvings at t=" + std::to_string(t0),
                                 st.error_estimate);
        self(t0, 0.5 * len, depth + 1, self);
        self(t0 + 0.5 * len, 0.5 * len, depth + 1, self);
    };

    for (long k = 0; k < n_steps; ++k) {
        advance(static_cast<double>(k) * h, h, 0, advance);
        const double nrm = vec::norm<cd>(std::span<const cd>(out.psi));
        const double err = std::abs(nrm - 1.0);
        if (err > opt.norm_tol)
            throw NumericalError("norm drifted by " + std::to_string(err) + " in one step", err);
        out.norm_drift += err;
        for (auto& x : out.psi) x /= nrm;
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

enum class InfidelityMode { amplitude, absolute };

/// amplitude: 1 - |<psi|RVB>| / ||psi||. absolute: 1 - <|psi| | RVB> with |psi| the
/// renormalized moduli, insensitive to per-configuration phases.
inline double prep_infidelity(std::span<const std::complex<double>> psi, const RvbVector& rvb, InfidelityMode mode) {
    if (psi.size() != rvb.amplitudes.size()) throw DimensionError("state/RVB dimension mismatch");
    const double nrm = vec::norm<std::complex<double>>(psi);
    if (mode == InfidelityMode::amplitude) return 1.0 - rvb_overlap<std::complex<double>>(psi, rvb) / nrm;
    double s = 0.0;
    for (std::size_t k : rvb.support) s += std::abs(psi[k]);
    return 1.0 - s / (nrm * std::sqrt(static_cast<double>(rvb.coverings)));
}

struct ScanRow {
    double parameter = 0.0;
    double total_time = 0.0;
    double infidelity_amp = 0.0;
    double infidelity_abs = 0.0;
    double norm_drift = 0.0;
    long steps = 0;
    double wall_seconds = 0.0;
    std::string error;
};

struct AnnealOptions {
    double delta0 = -5.0;
    double delta_f = 1.5;
    EvolveOptions evolve{};
};

inline ScanRow anneal_row(const Model& m, double T, const AnnealOptions& opt) {
    ScanRow row;
    row.total_time = T;
    try {
        const auto st = evolve(m, make_schedule(T, opt.delta0, opt.delta_f), opt.evolve);
        row.infidelity_amp = prep_infidelity(st.psi, m.rvb, InfidelityMode::amplitude);
        row.infidelity_abs = prep_infidelity(st.psi, m.rvb, InfidelityMode::absolute);
        row.norm_drift = st.norm_drift;
        row.steps = st.steps;
        row.wall_seconds = st.wall_seconds;
    } catch (const NumericalError& e) {
        row.error = e.what();
        row.infidelity_amp = row.infidelity_abs = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

/// One row per total time; `parameter` is T divided by the atom count.
inline std::vector<ScanRow> scan_T(const Model& m, const std::vector<double>& T_list, const AnnealOptions& opt = {}) {
    if (T_list.empty()) throw ConfigError("empty T list");
    if (m.coverings.empty()) throw ConstraintError("cluster has no dimer coverings");
    std::vector<ScanRow> rows;
    for (double T : T_list) {
        auto r = anneal_row(m, T, opt);
        r.parameter = T / m.array.size();
        rows.push_back(std::move(r));
    }
    return rows;
}

/// One row per alpha at fixed T. Each alpha gets its own model (only the
/// detuning pattern changes; the basis is shared through `base`).
inline std::vector<ScanRow> scan_alpha(const Model& base, const std::vector<double>& alphas, double T,
                                       const AnnealOptions& opt = {}) {
    if (alphas.empty()) throw ConfigError("empty alpha list");
    if (base.coverings.empty()) throw ConstraintError("cluster has no dimer coverings");
    std::vector<ScanRow> rows;
    Model m = base;
    for (double a : alphas) {
        if (!(a > 0.0)) throw ConfigError("alpha must be positive");
        m.array.alpha = a;
        for (auto& atom : m.array.atoms)
            if (atom.role == AtomRole::gadget) atom.detuning_coeff = a;
        auto r = anneal_row(m, T, opt);
        r.parameter = a;
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const std::string& parameter_name,
                           bool with_abs) {
    os << parameter_name << ",infidelity_amp";
    if (with_abs) os << ",infidelity_abs";
    os << ",norm_drift,steps\n";
    for (const auto& r : rows) {
        os << fmt(r.parameter) << ',' << fmt(r.infidelity_amp);
        if (with_abs) os << ',' << fmt(r.infidelity_abs);
        os << ',' << fmt(r.norm_drift) << ',' << r.steps << '\n';
    }
}

}  // namespace rydimer
