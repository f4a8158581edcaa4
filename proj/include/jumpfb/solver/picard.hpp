#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "../field/coefficient.hpp"
#include "../field/io.hpp"
#include "../field/scalar_field.hpp"
#include "heaviside.hpp"
#include "linear.hpp"
#include "problem.hpp"
#include "stencil.hpp"

namespace jumpfb {

/// How the nonlinear coefficient A_eps(x, u) is averaged onto an edge.
enum class FaceAverage {
    // Exact edge mean of psi_eps(u) for u linear along the edge; a_+ and a_-
    // enter by harmonic mean of their nodal samples.
    edge_mean,
    // Harmonic mean of the nodal values A_eps(x_i, u_i).
    harmonic,
};

/// Smallest admissible smoothing width. The nodal harmonic rule flips whole
/// edges when a node changes sign, so its ramp must span two cells.
inline double epsilon_floor(double h, FaceAverage mode) {
    return mode == FaceAverage::harmonic ? 2.0 * h : h * h;
}

/// 0.1, 0.01, ... down to the floor, with the floor as final stage.
inline std::vector<double> default_eps_schedule(double h, FaceAverage mode = FaceAverage::edge_mean) {
    const double floor = epsilon_floor(h, mode);
    std::vector<double> s;
    for (double e = 0.1; e > 2.0 * floor; e *= 0.1) s.push_back(e);
    s.push_back(floor);
    return s;
}

struct SolverOptions {
    double tol = 1e-10;
    int max_iters = 200;
    double linear_tol = 1e-12;
    int linear_max_iters = 500;
    FaceAverage face = FaceAverage::edge_mean;
};

template <int Dim>
struct Solution {
    explicit Solution(ScalarField<Dim> field) : u(std::move(field)) {}

    ScalarField<Dim> u;
    double epsilon_final = 0.0;
    std::vector<double> eps_schedule;
    std::vector<int> picard_iters;
    std::vector<std::vector<double>> increments;  // per stage, sup-norm Picard increments
    std::vector<double> stage_drift;               // L2 distance between consecutive stages
    std::vector<int> linear_iters;
    double residual = 0.0;
    bool picard_monotone = true;
    bool max_principle = true;
    std::vector<std::string> diagnostics;
};

/// Nodal a_+ / a_- samples and, for matrix problems, P at cell centres.
template <int Dim>
struct CoefficientSamples {
    ScalarField<Dim> aplus;
    ScalarField<Dim> aminus;
    std::vector<Matrix<Dim>> cell_matrix;  // indexed by lower-corner node; empty for scalar problems

    CoefficientSamples(const TwoPhaseProblem<Dim>& p, const Grid<Dim>& g)
        : aplus(sample_coefficient(p.aplus, g)), aminus(sample_coefficient(p.aminus, g)) {
        if (!p.scalar()) {
            check_matrix_ellipticity(*p.matrix, g);
            cell_matrix.resize(g.size());
            g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
                for (int d = 0; d < Dim; ++d)
                    if (k[d] == g.cells()) return;
                Point<Dim> c = g.point(k);
                for (int d = 0; d < Dim; ++d) c[d] += 0.5 * g.h();
                cell_matrix[i] = (*p.matrix)(c);
            });
        }
    }
};

namespace detail {

inline double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

inline double nodal_conductivity(double ap, double am, double eps, double u) {
    return am + (ap - am) * smoothed_heaviside(eps, u);
}

} // namespace detail

/// Assembles div(A grad .) with Dirichlet rows on the box boundary from a
/// scalar edge conductivity conductivity(i, j). Edge coefficients are scaled
/// by h^(Dim-2); matrix problems multiply by P and add the cell-based
/// mixed-derivative terms.
template <int Dim, class EdgeConductivity>
StencilOperator<Dim> assemble_edges(const Grid<Dim>& g, const CoefficientSamples<Dim>& c,
                                    EdgeConductivity&& conductivity) {
    StencilOperator<Dim> op(g.cells());
    op.mark_box_boundary();
    const double hpow = std::pow(g.h(), Dim - 2);
    const bool matrix = !c.cell_matrix.empty();
    const int n = g.cells();
    std::array<std::vector<double>, Dim> edge_a;  // A_e before geometric scaling, kept for the cell average
    if (matrix)
        for (auto& v : edge_a) v.assign(g.size(), 0.0);

    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        for (int d = 0; d < Dim; ++d) {
            if (k[d] == n) continue;
            const std::size_t j = i + g.stride(d);
            const double a = conductivity(i, j);
            if (!matrix) {
                op.face[d][i] = a * hpow;
                continue;
            }
            edge_a[d][i] = a;
            // mean of P_dd over the cells sharing this edge
            double pdd = 0.0;
            int count = 0;
            for (unsigned m = 0; m < (1u << (Dim - 1)); ++m) {
                Index<Dim> cell = k;
                bool ok = true;
                int bit = 0;
                for (int e = 0; e < Dim; ++e) {
                    if (e == d) continue;
                    if (m & (1u << bit)) cell[e] -= 1;
                    ++bit;
                    if (cell[e] < 0 || cell[e] >= n) ok = false;
                }
                if (!ok) continue;
                pdd += c.cell_matrix[g.ravel(cell)][d][d];
                ++count;
            }
            op.face[d][i] = (a * (pdd / count)) * hpow;
        }
    });

    if (matrix) {
        bool any = false;
        for (auto& v : op.cross) v.assign(g.size(), 0.0);
        const double scale = hpow / double(1u << Dim);
        g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
            for (int d = 0; d < Dim; ++d)
                if (k[d] == n) return;
            // average edge conductivity over the cell's edges
            double sum = 0.0;
            int count = 0;
            for (int d = 0; d < Dim; ++d) {
                for (unsigned m = 0; m < (1u << Dim); ++m) {
                    if (m & (1u << d)) continue;
                    std::size_t off = 0;
                    for (int e = 0; e < Dim; ++e)
                        if (m & (1u << e)) off += g.stride(e);
                    sum += edge_a[d][i + off];
                    ++count;
                }
            }
            const double abar = sum / count;
            const auto& P = c.cell_matrix[i];
            for (int d = 0; d < Dim; ++d)
                for (int e = d + 1; e < Dim; ++e) {
                    const double v = abar * P[d][e] * scale;
                    op.cross[StencilOperator<Dim>::pair_index(d, e)][i] = v;
                    any = any || v != 0.0;
                }
        });
        op.has_cross = any;
        if (!any)
            for (auto& v : op.cross) v.clear();
    }
    return op;
}

/// Linearised operator div(A_eps(x, u_frozen) grad .).
template <int Dim>
StencilOperator<Dim> assemble_operator(const Grid<Dim>& g, const CoefficientSamples<Dim>& c,
                                       const ScalarField<Dim>& u, double eps, FaceAverage mode) {
    if (mode == FaceAverage::edge_mean)
        return assemble_edges(g, c, [&](std::size_t i, std::size_t j) {
            const double ap = detail::harmonic_mean(c.aplus[i], c.aplus[j]);
            const double am = detail::harmonic_mean(c.aminus[i], c.aminus[j]);
            return am + (ap - am) * ramp_edge_mean(eps, u[i], u[j]);
        });
    return assemble_edges(g, c, [&](std::size_t i, std::size_t j) {
        return detail::harmonic_mean(detail::nodal_conductivity(c.aplus[i], c.aminus[i], eps, u[i]),
                                     detail::nodal_conductivity(c.aplus[j], c.aminus[j], eps, u[j]));
    });
}

/// Single-phase operator div(a_+ grad .) (plus = true) or div(a_- grad .).
template <int Dim>
StencilOperator<Dim> assemble_phase_operator(const Grid<Dim>& g, const CoefficientSamples<Dim>& c, bool plus) {
    const auto& a = plus ? c.aplus : c.aminus;
    return assemble_edges(g, c, [&](std::size_t i, std::size_t j) { return detail::harmonic_mean(a[i], a[j]); });
}

namespace detail {

template <int Dim>
double boundary_forcing_norm(const StencilOperator<Dim>& op, const std::vector<double>& x) {
    std::vector<double> xb(x.size(), 0.0), y;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (op.fixed[i]) xb[i] = x[i];
    op.apply(xb, y);
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s);
}

template <int Dim>
double l2_box_distance(const ScalarField<Dim>& a, const ScalarField<Dim>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s * std::pow(a.grid().h(), Dim));
}

template <int Dim>
ScalarField<Dim> initial_guess(const TwoPhaseProblem<Dim>& p, const Grid<Dim>& g) {
    ScalarField<Dim> u(g);
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) { u[i] = p.boundary(g.point(k)); });
    return u;
}

template <int Dim>
void require_eps(double eps, const Grid<Dim>& g, FaceAverage mode) {
    const double floor = epsilon_floor(g.h(), mode);
    if (!(eps > 0.0)) throw PreconditionError("smoothing width must be positive");
    if (eps < floor * (1.0 - 1e-12))
        throw PreconditionError("smoothing width " + format_real(eps, 6) + " is below the floor " +
                                format_real(floor, 6) + " for h = " + format_real(g.h(), 6));
}

struct StageResult {
    int iterations = 0;
    std::vector<double> increments;
    int linear_iterations = 0;
};

// Picard iteration at fixed eps, starting from (and overwriting) u.
template <int Dim>
StageResult picard_stage(const Grid<Dim>& g, const CoefficientSamples<Dim>& c, ScalarField<Dim>& u, double eps,
                         const SolverOptions& opt) {
    StageResult out;
    std::vector<double> x(u.values().begin(), u.values().end());
    for (int m = 1; m <= opt.max_iters; ++m) {
        const auto op = assemble_operator(g, c, u, eps, opt.face);
        const MultigridPreconditioner<Dim> mg(op);
        const std::vector<double> zero(x.size(), 0.0);
        const double ref = boundary_forcing_norm(op, x);
        const auto stats = pcg(op, mg, zero, x, opt.linear_tol, opt.linear_max_iters, ref > 0.0 ? ref : 1.0);
        out.linear_iterations += stats.iterations;
        double inc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            inc = std::max(inc, std::abs(x[i] - u[i]));
            u[i] = x[i];
        }
        out.increments.push_back(inc);
        out.iterations = m;
        if (!std::isfinite(inc)) break;
        if (inc <= opt.tol) return out;
    }
    throw NonConvergence("Picard iteration did not reach tolerance " + format_real(opt.tol, 3) + " in " +
                             std::to_string(opt.max_iters) + " iterations at eps = " + format_real(eps, 6),
                         out.increments);
}

} // namespace detail

/// Maximum over interior nodes of |(A_eps(u) u)_i|, the discrete weak form
/// tested against the nodal hat function, normalised by
/// |grad u|_{L2} h^(Dim/2). Zero for u constant.
template <int Dim>
double weak_residual(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p, double eps,
                     FaceAverage mode = FaceAverage::edge_mean) {
    const auto& g = u.grid();
    const CoefficientSamples<Dim> c(p, g);
    const auto op = assemble_operator(g, c, u, eps, mode);
    std::vector<double> x(u.values().begin(), u.values().end()), y;
    op.apply(x, y);
    double rmax = 0.0;
    for (double v : y) rmax = std::max(rmax, std::abs(v));
    if (rmax == 0.0) return 0.0;
    double energy = 0.0;
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        for (int d = 0; d < Dim; ++d) {
            if (k[d] == g.cells()) continue;
            const double du = u[i + g.stride(d)] - u[i];
            energy += du * du;
        }
    });
    energy *= std::pow(g.h(), Dim - 2);
    const double denom = std::sqrt(energy) * std::pow(g.h(), 0.5 * Dim);
    return denom > 0.0 ? rmax / denom : rmax;
}

namespace detail {

template <int Dim>
void finalize(Solution<Dim>& s, const TwoPhaseProblem<Dim>& p, const SolverOptions& opt) {
    const auto& g = s.u.grid();
    s.residual = weak_residual(s.u, p, s.epsilon_final, opt.face);
    double lo = INFINITY, hi = -INFINITY;
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        if (!g.on_boundary(k)) return;
        lo = std::min(lo, s.u[i]);
        hi = std::max(hi, s.u[i]);
    });
    const double slack = 1e-8 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    for (double v : s.u.values())
        if (v < lo - slack || v > hi + slack) s.max_principle = false;
    if (!s.max_principle) s.diagnostics.push_back("discrete maximum principle violated");
    for (std::size_t k = 0; k < s.increments.size(); ++k) {
        const auto& inc = s.increments[k];
        for (std::size_t m = 4; m < inc.size(); ++m)
            if (inc[m] > inc[m - 1] * (1.0 + 1e-9) && inc[m] > opt.tol) {
                s.picard_monotone = false;
                s.diagnostics.push_back("stage " + std::to_string(k) + ": Picard increment grew at iteration " +
                                        std::to_string(m + 1) + " (possible ill-conditioning)");
                break;
            }
    }
    if (!s.u.all_finite()) throw Error("solution contains non-finite values");
}

} // namespace detail

/// Fixed-point solve of div(A_eps(x, u) grad u) = 0 with u = g on the box
/// boundary at a single smoothing width.
template <int Dim>
Solution<Dim> picard_solve(const TwoPhaseProblem<Dim>& p, const Grid<Dim>& g, double eps,
                           const SolverOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw PreconditionError("Picard tolerance must be positive");
    detail::require_eps(eps, g, opt.face);
    const CoefficientSamples<Dim> c(p, g);
    Solution<Dim> s{detail::initial_guess(p, g)};
    auto r = detail::picard_stage(g, c, s.u, eps, opt);
    s.epsilon_final = eps;
    s.eps_schedule = {eps};
    s.picard_iters = {r.iterations};
    s.increments = {r.increments};
    s.linear_iters = {r.linear_iterations};
    detail::finalize(s, p, opt);
    return s;
}

/// Warm-started Picard solves along a strictly decreasing eps schedule.
template <int Dim>
Solution<Dim> continuation_solve(const TwoPhaseProblem<Dim>& p, const Grid<Dim>& g,
                                 const std::vector<double>& schedule, const SolverOptions& opt = {}) {
    if (schedule.empty()) throw PreconditionError("eps schedule is empty");
    for (std::size_t k = 1; k < schedule.size(); ++k)
        if (!(schedule[k] < schedule[k - 1])) throw PreconditionError("eps schedule must be strictly decreasing");
    if (!(opt.tol > 0.0)) throw PreconditionError("Picard tolerance must be positive");
    detail::require_eps(schedule.back(), g, opt.face);
    const CoefficientSamples<Dim> c(p, g);
    Solution<Dim> s{detail::initial_guess(p, g)};
    s.eps_schedule = schedule;
    ScalarField<Dim> previous = s.u;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        detail::StageResult r;
        try {
            r = detail::picard_stage(g, c, s.u, schedule[k], opt);
        } catch (const Error& e) {
            throw StageFailure("continuation stage " + std::to_string(k) + " (eps = " + format_real(schedule[k], 6) +
                                   "): " + e.what(),
                               k);
        }
        s.picard_iters.push_back(r.iterations);
        s.increments.push_back(std::move(r.increments));
        s.linear_iters.push_back(r.linear_iterations);
        if (k > 0) s.stage_drift.push_back(detail::l2_box_distance(s.u, previous));
        previous = s.u;
    }
    s.epsilon_final = schedule.back();
    for (std::size_t k = 1; k < s.stage_drift.size(); ++k)
        if (s.stage_drift[k] > s.stage_drift[k - 1])
            s.diagnostics.push_back("stage drift grew between stages " + std::to_string(k) + " and " +
                                    std::to_string(k + 1) + "; the limit may depend on the schedule");
    detail::finalize(s, p, opt);
    return s;
}

} // namespace jumpfb
