#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "../error.hpp"
#include "stencil.hpp"

namespace jumpfb {

struct LinearSolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for A x = b on the free rows.
/// Fixed rows of x keep their entry values and act as Dirichlet data; fixed
/// rows of b are ignored. Convergence is declared when the residual drops to
/// rel_tol times reference_norm (default: |b|, or the initial residual when
/// b vanishes). The preconditioner must be symmetric positive definite.
template <class Op, class Precond>
LinearSolveStats pcg(const Op& op, const Precond& precond, const std::vector<double>& b, std::vector<double>& x,
                     double rel_tol, int max_iters, double reference_norm = -1.0) {
    const std::size_t n = b.size();
    const auto& fixed = op.fixed;
    auto dotp = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!fixed[i]) s += a[i] * c[i];
        return s;
    };
    std::vector<double> r(n), z(n), p(n), q(n);
    op.apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = fixed[i] ? 0.0 : b[i] - q[i];
    const double bnorm = std::sqrt(dotp(b, b));
    double rnorm = std::sqrt(dotp(r, r));
    LinearSolveStats stats;
    if (bnorm == 0.0 && rnorm == 0.0) return stats;
    const double scale = reference_norm > 0.0 ? reference_norm : (bnorm > 0.0 ? bnorm : rnorm);
    const double target = rel_tol * scale;
    if (rnorm <= target) {
        stats.relative_residual = rnorm / scale;
        return stats;
    }
    precond.apply(r, z);
    p = z;
    double rz = dotp(r, z);
    // p must vanish on fixed rows so that x keeps its boundary values
    for (std::size_t i = 0; i < n; ++i)
        if (fixed[i]) p[i] = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        op.apply(p, q);
        const double pq = dotp(p, q);
        if (!(pq > 0.0) || !std::isfinite(pq))
            throw SolverBreakdown("conjugate gradients: non-positive curvature p^T A p = " + std::to_string(pq), it,
                                  rnorm / scale);
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            if (fixed[i]) continue;
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = std::sqrt(dotp(r, r));
        stats.iterations = it;
        stats.relative_residual = rnorm / scale;
        if (rnorm <= target) return stats;
        precond.apply(r, z);
        const double rz_new = dotp(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = fixed[i] ? 0.0 : z[i] + beta * p[i];
    }
    throw SolverBreakdown("conjugate gradients: no convergence in " + std::to_string(max_iters) + " iterations",
                          max_iters, stats.relative_residual);
}

template <int Dim>
class JacobiPreconditioner {
public:
    explicit JacobiPreconditioner(const StencilOperator<Dim>& op) : inv_(op.lattice.size, 0.0) {
        for (std::size_t i = 0; i < inv_.size(); ++i)
            if (!op.fixed[i]) inv_[i] = 1.0 / op.diagonal(i);
    }
    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        z.resize(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_[i] * r[i];
    }

private:
    std::vector<double> inv_;
};

/// Geometric multigrid V-cycle on the face part of a box-Dirichlet
/// operator, used as a CG preconditioner. Coarse faces combine two fine
/// faces in series along the edge and sum transverse neighbours with
/// weights (1/2, 1, 1/2). Restriction is the transpose of multilinear
/// prolongation; pre-smoothing is forward Gauss-Seidel and post-smoothing
/// backward, so one cycle is a symmetric operator.
template <int Dim>
class MultigridPreconditioner {
public:
    explicit MultigridPreconditioner(const StencilOperator<Dim>& fine, int sweeps = 2) : sweeps_(sweeps) {
        levels_.push_back(face_copy(fine));
        while (levels_.back().lattice.cells % 2 == 0 && levels_.back().lattice.cells > 8) {
            levels_.push_back(coarsen(levels_.back()));
        }
        factor_coarsest();
        work_.resize(levels_.size());
    }

    std::size_t depth() const { return levels_.size(); }

    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        z.assign(r.size(), 0.0);
        cycle(0, r, z);
    }

private:
    struct Work {
        std::vector<double> res, tmp, rc, zc;
    };

    static StencilOperator<Dim> face_copy(const StencilOperator<Dim>& op) {
        StencilOperator<Dim> c(op.lattice.cells);
        c.face = op.face;
        c.fixed = op.fixed;
        return c;
    }

    static StencilOperator<Dim> coarsen(const StencilOperator<Dim>& f) {
        const int nc = f.lattice.cells / 2;
        StencilOperator<Dim> c(nc);
        c.mark_box_boundary();
        const auto& L = f.lattice;
        for (std::size_t I = 0; I < c.lattice.size; ++I) {
            const Index<Dim> K = c.lattice.unravel(I);
            for (int d = 0; d < Dim; ++d) {
                if (K[d] == nc) continue;
                double sum = 0.0;
                // transverse offsets in {-1,0,1}^(Dim-1)
                const int count = Dim == 2 ? 3 : 9;
                for (int t = 0; t < count; ++t) {
                    Index<Dim> k;
                    double w = 1.0;
                    int tt = t;
                    bool ok = true;
                    for (int a = 0; a < Dim; ++a) {
                        k[a] = 2 * K[a];
                        if (a == d) continue;
                        const int off = tt % 3 - 1;
                        tt /= 3;
                        k[a] += off;
                        if (off != 0) w *= 0.5;
                        if (k[a] < 0 || k[a] > L.cells) ok = false;
                    }
                    if (!ok) continue;
                    const std::size_t i0 = L.ravel(k);
                    const std::size_t i1 = i0 + L.stride[d];
                    const double k0 = f.face[d][i0], k1 = f.face[d][i1];
                    if (k0 > 0.0 && k1 > 0.0) sum += w * k0 * k1 / (k0 + k1);
                }
                c.face[d][I] = sum;
            }
        }
        return c;
    }

    void factor_coarsest() {
        const auto& op = levels_.back();
        free_.clear();
        for (std::size_t i = 0; i < op.lattice.size; ++i)
            if (!op.fixed[i]) free_.push_back(i);
        const std::size_t m = free_.size();
        if (m > kMaxDenseCoarse) {
            free_.clear();
            return;
        }
        std::vector<long> pos(op.lattice.size, -1);
        for (std::size_t a = 0; a < m; ++a) pos[free_[a]] = static_cast<long>(a);
        chol_.assign(m * m, 0.0);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t i = free_[a];
            chol_[a * m + a] = op.diagonal(i);
            for (int d = 0; d < Dim; ++d) {
                const std::size_t s = op.lattice.stride[d];
                if (pos[i + s] >= 0) chol_[a * m + pos[i + s]] -= op.face[d][i];
                if (pos[i - s] >= 0) chol_[a * m + pos[i - s]] -= op.face[d][i - s];
            }
        }
        // in-place lower Cholesky
        for (std::size_t j = 0; j < m; ++j) {
            double s = chol_[j * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= chol_[j * m + k] * chol_[j * m + k];
            if (!(s > 0.0)) throw SolverBreakdown("multigrid coarse operator is not positive definite", 0, 0.0);
            const double djj = std::sqrt(s);
            chol_[j * m + j] = djj;
            for (std::size_t i = j + 1; i < m; ++i) {
                double t = chol_[i * m + j];
                for (std::size_t k = 0; k < j; ++k) t -= chol_[i * m + k] * chol_[j * m + k];
                chol_[i * m + j] = t / djj;
            }
        }
    }

    void solve_coarsest(const std::vector<double>& b, std::vector<double>& x) const {
        const std::size_t m = free_.size();
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) {
            double s = b[free_[i]];
            for (std::size_t k = 0; k < i; ++k) s -= chol_[i * m + k] * y[k];
            y[i] = s / chol_[i * m + i];
        }
        for (std::size_t ii = m; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < m; ++k) s -= chol_[k * m + ii] * y[k];
            y[ii] = s / chol_[ii * m + ii];
        }
        x.assign(b.size(), 0.0);
        for (std::size_t i = 0; i < m; ++i) x[free_[i]] = y[i];
    }

    static void gauss_seidel(const StencilOperator<Dim>& op, const std::vector<double>& b, std::vector<double>& x,
                             bool forward) {
        const std::size_t n = op.lattice.size;
        auto relax = [&](std::size_t i) {
            if (op.fixed[i]) return;
            double num = b[i], diag = 0.0;
            for (int d = 0; d < Dim; ++d) {
                const std::size_t s = op.lattice.stride[d];
                const double kr = op.face[d][i], kl = op.face[d][i - s];
                num += kr * x[i + s] + kl * x[i - s];
                diag += kr + kl;
            }
            x[i] = num / diag;
        };
        if (forward)
            for (std::size_t i = 0; i < n; ++i) relax(i);
        else
            for (std::size_t i = n; i-- > 0;) relax(i);
    }

    template <class F>
    static void for_each_prolongation(const Lattice<Dim>& fine, const Lattice<Dim>& coarse, F&& f) {
        Index<Dim> k{};
        for (std::size_t i = 0; i < fine.size; ++i) {
            // enumerate the up-to-2^Dim coarse parents of fine node k
            for (unsigned m = 0; m < (1u << Dim); ++m) {
                double w = 1.0;
                Index<Dim> K;
                bool valid = true;
                for (int d = 0; d < Dim; ++d) {
                    const bool up = m & (1u << d);
                    if (k[d] % 2 == 0) {
                        if (up) {
                            valid = false;
                            break;
                        }
                        K[d] = k[d] / 2;
                    } else {
                        K[d] = (k[d] - 1) / 2 + (up ? 1 : 0);
                        w *= 0.5;
                    }
                }
                if (valid) f(i, coarse.ravel(K), w);
            }
            for (int d = Dim - 1; d >= 0; --d) {
                if (++k[d] <= fine.cells) break;
                k[d] = 0;
            }
        }
    }

    void cycle(std::size_t level, const std::vector<double>& b, std::vector<double>& x) const {
        const auto& op = levels_[level];
        if (level + 1 == levels_.size()) {
            if (!chol_.empty()) {
                solve_coarsest(b, x);
                return;
            }
            // too large for a dense factor: symmetric relaxation only
            for (int s = 0; s < 50; ++s) {
                gauss_seidel(op, b, x, true);
                gauss_seidel(op, b, x, false);
            }
            return;
        }
        auto& w = work_[level];
        for (int s = 0; s < sweeps_; ++s) gauss_seidel(op, b, x, true);
        op.apply(x, w.tmp);
        w.res.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) w.res[i] = op.fixed[i] ? 0.0 : b[i] - w.tmp[i];
        const auto& coarse = levels_[level + 1];
        w.rc.assign(coarse.lattice.size, 0.0);
        for_each_prolongation(op.lattice, coarse.lattice,
                              [&](std::size_t i, std::size_t I, double wt) { w.rc[I] += wt * w.res[i]; });
        for (std::size_t I = 0; I < w.rc.size(); ++I)
            if (coarse.fixed[I]) w.rc[I] = 0.0;
        w.zc.assign(coarse.lattice.size, 0.0);
        cycle(level + 1, w.rc, w.zc);
        for_each_prolongation(op.lattice, coarse.lattice, [&](std::size_t i, std::size_t I, double wt) {
            if (!op.fixed[i]) x[i] += wt * w.zc[I];
        });
        for (int s = 0; s < sweeps_; ++s) gauss_seidel(op, b, x, false);
    }

    static constexpr std::size_t kMaxDenseCoarse = 3000;

    int sweeps_;
    std::vector<StencilOperator<Dim>> levels_;
    std::vector<std::size_t> free_;
    std::vector<double> chol_;
    mutable std::vector<Work> work_;
};

} // namespace jumpfb
