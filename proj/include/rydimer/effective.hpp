#pragma once

// Effective Hamiltonians on the fully-packed dimer manifold (plaquette flip and
// flippable-plaquette potential) and log-log fits of how low-energy splittings
// of the full Rydberg model scale with Delta.

#include "rydimer/dimer.hpp"
#include "rydimer/krylov.hpp"
#include "rydimer/model.hpp"

#include <functional>
#include <map>

namespace rydimer {

enum class EffectiveForm { flip_only, diagonal_only, both };

struct EffectiveParams {
    double t = 1.0;  ///< plaquette flip amplitude
    double V = 0.0;  ///< weight per flippable plaquette
};

/// Operator on span{coverings}: -t per plaquette flip connecting two
/// coverings, -V times the number of flippable plaquettes on the diagonal.
inline SparseOperator build_effective(const Cluster& cl, const std::vector<DimerCovering>& coverings,
                                      const EffectiveParams& p, EffectiveForm form) {
    const auto plaq = plaquettes(cl);
    std::map<DimerCovering, std::size_t> index;
    for (std::size_t i = 0; i < coverings.size(); ++i) index.emplace(coverings[i], i);
    SparseOperator op;
    op.dim = coverings.size();
    op.row_offsets.assign(op.dim + 1, 0);
    const bool flips = form != EffectiveForm::diagonal_only;
    const bool diag = form != EffectiveForm::flip_only;
    for (std::size_t i = 0; i < coverings.size(); ++i) {
        std::map<std::size_t, double> row;
        int flippable = 0;
        for (const auto& pl : plaq) {
            if (!is_flippable(coverings[i], pl)) continue;
            ++flippable;
            if (!flips) continue;
            auto it = index.find(flip(coverings[i], pl));
            if (it == index.end()) throw ConstraintError("plaquette flip left the covering set");
            row[it->second] -= p.t;
        }
        if (diag && flippable > 0) row[i] -= p.V * flippable;
        for (auto [j, v] : row) {
            if (v == 0.0) continue;
            op.cols.push_back(static_cast<std::uint32_t>(j));
            op.values.push_back(v);
        }
        op.row_offsets[i + 1] = op.values.size();
    }
    return op;
}

/// Number of flippable plaquettes per covering.
inline std::vector<int> flippable_counts(const Cluster& cl, const std::vector<DimerCovering>& coverings) {
    const auto plaq = plaquettes(cl);
    std::vector<int> out;
    for (const auto& c : coverings)
        out.push_back(static_cast<int>(std::count_if(plaq.begin(), plaq.end(), [&](const Plaquette& p) { return is_flippable(c, p); })));
    return out;
}

/// Two-colouring of the flip graph; empty when it is not bipartite.
inline std::vector<int> flip_graph_coloring(const Cluster& cl, const std::vector<DimerCovering>& coverings) {
    const auto op = build_effective(cl, coverings, {1.0, 0.0}, EffectiveForm::flip_only);
    std::vector<int> color(op.dim, -1);
    for (std::size_t s = 0; s < op.dim; ++s) {
        if (color[s] >= 0) continue;
        color[s] = 0;
        std::vector<std::size_t> stack{s};
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t k = op.row_offsets[i]; k < op.row_offsets[i + 1]; ++k) {
                const std::size_t j = op.cols[k];
                if (color[j] < 0) {
                    color[j] = 1 - color[i];
                    stack.push_back(j);
                } else if (color[j] == color[i]) {
                    return {};
                }
            }
        }
    }
    return color;
}

/// True when two distinct signed bond vectors differ by a span-lattice vector,
/// i.e. the torus has several edges between one vertex pair. Such clusters
/// allow single-dimer hops at low order.
inline bool has_parallel_edges(const LatticeSpec& spec) {
    const long det = spec.determinant();
    const int nd = bond_directions(spec.kind);
    auto in_lattice = [&](Vec2i d) {
        // d = x span1 + y span2 with integer x, y (Cramer's rule)
        const long nx = static_cast<long>(d.x) * spec.span2.y - static_cast<long>(d.y) * spec.span2.x;
        const long ny = static_cast<long>(spec.span1.x) * d.y - static_cast<long>(spec.span1.y) * d.x;
        return nx % det == 0 && ny % det == 0;
    };
    for (int a = 0; a < 2 * nd; ++a)
        for (int b = a + 1; b < 2 * nd; ++b) {
            const Vec2i va = bond_vector(spec.kind, a), vb = bond_vector(spec.kind, b);
            if (in_lattice({va.x - vb.x, va.y - vb.y})) return true;
        }
    return false;
}

// ---------------------------------------------------------------------------
// Scaling of low-energy splittings

/// The k lowest eigenvalues, by deflated restarted Lanczos (dense below the threshold).
template <RealSymmetricOperator Op>
std::vector<double> lowest_eigenvalues(const Op& H, std::size_t k, const LanczosOptions& opt = {}) {
    const std::size_t n = H.size();
    if (k == 0 || k > n) throw DimensionError("requested eigenvalue count out of range");
    std::vector<double> out;
    if (n <= opt.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::dense_matrix(H), Eigen::EigenvaluesOnly);
        for (std::size_t i = 0; i < k; ++i) out.push_back(es.eigenvalues()(static_cast<Eigen::Index>(i)));
        return out;
    }
    std::vector<std::vector<double>> found;
    for (std::size_t i = 0; i < k; ++i) {
        auto r = detail::lanczos_lowest(H, detail::random_start(n, opt.seed + i), opt, found);
        if (!r.converged) throw NumericalError("deflated Lanczos did not converge", r.residual);
        // re-orthogonalize against earlier vectors so later deflations stay clean
        for (const auto& d : found) {
            const double c = vec::dot(d, r.vector);
            for (std::size_t j = 0; j < n; ++j) r.vector[j] -= c * d[j];
        }
        const double nrm = vec::norm<double>(r.vector);
        for (auto& x : r.vector) x /= nrm;
        out.push_back(r.theta);
        found.push_back(std::move(r.vector));
    }
    std::sort(out.begin(), out.end());
    return out;
}

enum class SplittingKind {
    doublet,          ///< E1 - E0
    manifold_spread,  ///< E_{N-1} - E0 over the N lowest levels, N = covering count
};

struct ScalingPoint {
    double delta = 0.0;
    double splitting = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;  ///< slope of log|splitting| vs log Delta
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<ScalingPoint> points;
};

/// Least-squares line through (log x, log y).
inline ScalingFit fit_loglog(const std::vector<ScalingPoint>& pts) {
    if (pts.size() < 2) throw ConfigError("scaling fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& p : pts) {
        const double x = std::log(p.delta), y = std::log(std::abs(p.splitting));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    ScalingFit f;
    const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    f.exponent = cxy / vx;
    f.intercept = (sy - f.exponent * sx) / n;
    f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
    f.points = pts;
    return f;
}

/// Splitting of the low-energy manifold of the full model at Omega = 1.
/// Throws PrecisionError when it is below 100 eps ||H||.
inline double low_energy_splitting(const Model& m, double delta, SplittingKind kind, const LanczosOptions& opt = {}) {
    const auto H = m.hamiltonian(1.0, delta);
    if (m.coverings.size() < 2) throw ConstraintError("splitting needs at least two coverings");
    const std::size_t k = kind == SplittingKind::doublet ? 2 : m.coverings.size();
    const auto ev = lowest_eigenvalues(H, k, opt);
    const double split = ev.back() - ev.front();
    double hnorm = 0.0;
    for (std::size_t i = 0; i < m.terms.dim; ++i)
        hnorm = std::max(hnorm, std::abs(H.diag[i]) + static_cast<double>(m.terms.flips(i)));
    if (split < 100.0 * std::numeric_limits<double>::epsilon() * hnorm)
        throw PrecisionError("splitting " + std::to_string(split) + " is below working precision at Delta=" + std::to_string(delta));
    return split;
}

inline ScalingFit scaling_fit(const Model& m, const std::vector<double>& deltas, SplittingKind kind,
                              const LanczosOptions& opt = {}) {
    std::vector<ScalingPoint> pts;
    for (double d : deltas) pts.push_back({d, low_energy_splitting(m, d, kind, opt)});
    return fit_loglog(pts);
}

}  // namespace rydimer
