#pragma once

// Lanczos-based eigensolver and Krylov time propagator for real symmetric
// operators. Any type with size() and apply(span<const T>, span<T>) works.

#include "rydimer/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace rydimer {

template <class Op>
concept RealSymmetricOperator = requires(const Op& op, std::span<const double> x, std::span<double> y,
                                         std::span<const std::complex<double>> cx, std::span<std::complex<double>> cy) {
    { op.size() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);
    op.apply(cx, cy);
};

namespace vec {

template <class T>
inline double norm(std::span<const T> x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::complex<double> dot(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

template <class T>
inline void scale(std::span<T> x, double s) {
    for (auto& v : x) v *= s;
}

}  // namespace vec

struct LanczosOptions {
    double tol = 1e-10;              ///< residual tolerance, relative to max(1, |E|)
    int krylov_dim = 80;             ///< vectors kept per restart cycle
    int max_restarts = 400;
    std::uint64_t seed = 20240611;   ///< random start when no guess is given
    std::size_t dense_threshold = 2000;
    bool compute_gap = false;        ///< also solve for E1 (deflated) to set the degeneracy flag
    double degeneracy_tol = 1e-10;   ///< relative gap below which the ground state is flagged
};

struct GroundState {
    double energy = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    bool degenerate = false;
    double gap = std::numeric_limits<double>::quiet_NaN();
    long matvecs = 0;
};

namespace detail {

/// Makes the sign deterministic: the largest-magnitude entry (lowest index on ties) is positive.
inline void fix_sign(std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best]) * (1.0 + 1e-12)) best = i;
    if (!v.empty() && v[best] < 0.0)
        for (auto& x : v) x = -x;
}

template <RealSymmetricOperator Op>
Eigen::MatrixXd dense_matrix(const Op& H) {
    const std::size_t n = H.size();
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        H.apply(std::span<const double>(e), std::span<double>(col));
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return M;
}

struct LanczosResult {
    double theta = 0.0;
    std::vector<double> vector;
    double residual = std::numeric_limits<double>::infinity();
    long matvecs = 0;
    bool converged = false;
};

/// Restarted Lanczos with full reorthogonalization for the lowest eigenpair,
/// optionally restricted to the orthogonal complement of `deflate`.
template <RealSymmetricOperator Op>
LanczosResult lanczos_lowest(const Op& H, std::vector<double> v0, const LanczosOptions& opt,
                             const std::vector<std::vector<double>>& deflate = {}) {
    const std::size_t n = H.size();
    const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opt.krylov_dim), n));
    LanczosResult res;
    auto project_out = [&](std::vector<double>& w) {
        for (const auto& d : deflate) {
            const double c = vec::dot(d, w);
            for (std::size_t i = 0; i < n; ++i) w[i] -= c * d[i];
        }
    };
    std::vector<double> w(n), hv(n);
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        project_out(v0);
        double nv = vec::norm<double>(v0);
        if (nv == 0.0) throw NumericalError("Lanczos start vector vanished");
        vec::scale<double>(v0, 1.0 / nv);

        std::vector<std::vector<double>> V;
        V.push_back(v0);
        std::vector<double> a, b;
        Eigen::VectorXd ritz;
        double theta = 0.0, est = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m_max; ++j) {
            H.apply(std::span<const double>(V[static_cast<std::size_t>(j)]), std::span<double>(w));
            ++res.matvecs;
            const double aj = vec::dot(V[static_cast<std::size_t>(j)], w);
            a.push_back(aj);
            // full reorthogonalization; a second Gram-Schmidt pass only when the
            // first one cancelled most of w
            double bj = vec::norm<double>(w);
            for (int pass = 0; pass < 2; ++pass) {
                project_out(w);
                for (const auto& q : V) {
                    const double c = vec::dot(q, w);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
                }
                const double after = vec::norm<double>(w);
                const bool enough = after > 0.7 * bj;
                bj = after;
                if (enough) break;
            }
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
            Eigen::VectorXd off = b.empty() ? Eigen::VectorXd() : Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
            theta = tri.eigenvalues()(0);
            ritz = tri.eigenvectors().col(0);
            est = bj * std::abs(ritz(ritz.size() - 1));
            const double scale = std::max(1.0, std::abs(theta));
            if (est < 0.1 * opt.tol * scale || bj < 1e-14 * scale || j + 1 == m_max) break;
            b.push_back(bj);
            for (auto& x : w) x /= bj;
            V.push_back(w);
        }
        std::vector<double> psi(n, 0.0);
        for (Eigen::Index k = 0; k < ritz.size(); ++k) {
            const double c = ritz(k);
            const auto& q = V[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < n; ++i) psi[i] += c * q[i];
        }
        project_out(psi);
        vec::scale<double>(psi, 1.0 / vec::norm<double>(psi));
        H.apply(std::span<const double>(psi), std::span<double>(hv));
        ++res.matvecs;
        const double e = vec::dot(psi, hv);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) r2 += (hv[i] - e * psi[i]) * (hv[i] - e * psi[i]);
        res.theta = e;
        res.residual = std::sqrt(r2);
        res.vector = std::move(psi);
        if (res.residual < opt.tol * std::max(1.0, std::abs(e))) {
            res.converged = true;
            return res;
        }
        v0 = res.vector;
    }
    return res;
}

inline std::vector<double> random_start(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace detail

/// Lowest eigenpair. Dense diagonalization for dim <= dense_threshold,
/// restarted Lanczos otherwise. `guess` (if non-empty) seeds the iteration.
template <RealSymmetricOperator Op>
GroundState ground_state(const Op& H, const LanczosOptions& opt = {}, std::span<const double> guess = {}) {
    const std::size_t n = H.size();
    if (n == 0) throw DimensionError("empty operator");
    GroundState gs;
    if (n <= opt.dense_threshold) {
        const Eigen::MatrixXd M = detail::dense_matrix(H);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
        gs.energy = es.eigenvalues()(0);
        gs.vector.assign(es.eigenvectors().col(0).data(), es.eigenvectors().col(0).data() + n);
        detail::fix_sign(gs.vector);
        if (n > 1) gs.gap = es.eigenvalues()(1) - gs.energy;
        gs.degenerate = n > 1 && gs.gap < opt.degeneracy_tol * std::max(1.0, std::abs(gs.energy));
        Eigen::VectorXd r = M * es.eigenvectors().col(0) - gs.energy * es.eigenvectors().col(0);
        gs.residual = r.norm();
        gs.matvecs = static_cast<long>(n);
        return gs;
    }
    std::vector<double> v0 = guess.empty() ? detail::random_start(n, opt.seed) : std::vector<double>(guess.begin(), guess.end());
    auto r = detail::lanczos_lowest(H, std::move(v0), opt);
    if (!r.converged)
        throw NumericalError("Lanczos did not converge (residual " + std::to_string(r.residual) + ")", r.residual);
    gs.energy = r.theta;
    gs.residual = r.residual;
    gs.vector = std::move(r.vector);
    gs.matvecs = r.matvecs;
    detail::fix_sign(gs.vector);
    if (opt.compute_gap) {
        auto r1 = detail::lanczos_lowest(H, detail::random_start(n, opt.seed + 1), opt, {gs.vector});
        gs.matvecs += r1.matvecs;
        gs.gap = r1.theta - gs.energy;
        gs.degenerate = gs.gap < opt.degeneracy_tol * std::max(1.0, std::abs(gs.energy)) + r1.residual;
    }
    return gs;
}

// ---------------------------------------------------------------------------
// Krylov exponential

struct KrylovStepStats {
    int krylov_dim = 0;
    double error_estimate = 0.0;
};

/// psi <- exp(-i H t) psi via a Lanczos basis of at most `m_max` vectors.
/// Returns false (psi untouched) if the a-posteriori error estimate stays above tol.
template <RealSymmetricOperator Op>
bool krylov_expm_step(const Op& H, std::span<std::complex<double>> psi, double t, double tol, int m_max,
                      KrylovStepStats* stats = nullptr, std::vector<std::vector<std::complex<double>>>* workspace = nullptr) {
    using cd = std::complex<double>;
    const std::size_t n = H.size();
    std::vector<std::vector<cd>> local;
    auto& V = workspace ? *workspace : local;
    const double beta0 = vec::norm<cd>(std::span<const cd>(psi.data(), psi.size()));
    if (beta0 == 0.0) return true;
    if (V.size() < static_cast<std::size_t>(m_max + 1)) V.resize(static_cast<std::size_t>(m_max + 1));
    for (auto& v : V) v.resize(n);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = psi[i] / beta0;
    std::vector<double> a, b;
    Eigen::VectorXcd coeff;
    double err = std::numeric_limits<double>::infinity();
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        auto& w = V[static_cast<std::size_t>(j + 1)];
        H.apply(std::span<const cd>(V[static_cast<std::size_t>(j)]), std::span<cd>(w));
        const double aj = vec::dot(std::span<const cd>(V[static_cast<std::size_t>(j)]), std::span<const cd>(w)).real();
        a.push_back(aj);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] -= aj * V[static_cast<std::size_t>(j)][i];
            if (j > 0) w[i] -= b.back() * V[static_cast<std::size_t>(j - 1)][i];
        }
        const double bj = vec::norm<cd>(std::span<const cd>(w));
        m = j + 1;
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(a.data(), m);
        Eigen::VectorXd off = b.empty() ? Eigen::VectorXd() : Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        const Eigen::MatrixXd& S = tri.eigenvectors();
        Eigen::VectorXcd phase(m);
        for (int k = 0; k < m; ++k) phase(k) = std::exp(cd(0.0, -tri.eigenvalues()(k) * t)) * S(0, k);
        coeff = S.cast<cd>() * phase;
        err = bj * std::abs(coeff(m - 1));
        if (err < tol || bj < 1e-14) break;
        b.push_back(bj);
        for (auto& x : w) x /= bj;
    }
    if (stats) {
        stats->krylov_dim = m;
        stats->error_estimate = err;
    }
    if (!(err < tol)) return false;
    std::fill(psi.begin(), psi.end(), cd(0.0));
    for (int k = 0; k < m; ++k) {
        const cd c = beta0 * coeff(k);
        const auto& q = V[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < n; ++i) psi[i] += c * q[i];
    }
    return true;
}

}  // namespace rydimer
