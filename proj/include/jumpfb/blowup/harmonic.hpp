#pragma once

#include <cmath>
#include <vector>

#include "../solver/linear.hpp"
#include "../solver/stencil.hpp"
#include "../field/scalar_field.hpp"

namespace jumpfb {

template <int Dim>
struct HarmonicReplacement {
    ScalarField<Dim> h;
    Point<Dim> gradient_at_origin{};
    LinearSolveStats stats;
};

/// Discrete Laplace solve on the nodes strictly inside B_1 with h = w on
/// every other node (the staircase ball boundary and the box rim).
/// grad h(0) is the central difference at the origin node.
template <int Dim>
HarmonicReplacement<Dim> harmonic_replacement(const ScalarField<Dim>& w, double rel_tol = 1e-12) {
    const auto& g = w.grid();
    if (!w.all_finite()) throw PreconditionError("harmonic replacement needs finite data");
    if (g.radius() < 1.0 - 1e-12) throw PreconditionError("harmonic replacement needs a grid covering B_1");
    StencilOperator<Dim> op(g.cells());
    for (auto& f : op.face) std::fill(f.begin(), f.end(), 1.0);
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        if (g.on_boundary(k) || norm<Dim>(g.point(k)) >= 1.0 - 1e-12) op.fixed[i] = 1;
    });
    // faces leaving the box are never touched by free rows
    std::vector<double> x(w.values().begin(), w.values().end());
    std::vector<double> xb(x.size(), 0.0), y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (op.fixed[i]) xb[i] = x[i];
        else x[i] = 0.0;
    }
    op.apply(xb, y);
    double ref = 0.0;
    for (double v : y) ref += v * v;
    ref = std::sqrt(ref);
    const std::vector<double> zero(x.size(), 0.0);
    HarmonicReplacement<Dim> out{ScalarField<Dim>(g), {}, {}};
    if (ref > 0.0) out.stats = pcg(op, JacobiPreconditioner<Dim>(op), zero, x, rel_tol, 20 * g.cells() + 200, ref);
    out.h = ScalarField<Dim>(g, x);
    const std::size_t o = g.ravel(g.nearest(Point<Dim>{}));
    for (int d = 0; d < Dim; ++d)
        out.gradient_at_origin[d] = (x[o + g.stride(d)] - x[o - g.stride(d)]) / (2.0 * g.h());
    return out;
}

} // namespace jumpfb
