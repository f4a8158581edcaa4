#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "../field/quadrature.hpp"

namespace jumpfb {

/// I(r, z, u): integral over B_r(z) of |grad u|^2 |x - z|^(2-n), using the
/// gradient of the multilinear interpolant at cell subsamples. Subsamples
/// sit off the node lattice, so in 3-d the weight is never evaluated at z
/// when z is a node.
template <int Dim>
double weighted_energy(const ScalarField<Dim>& u, const Point<Dim>& z, double r) {
    const auto& g = u.grid();
    if (r < 4.0 * g.h() * (1.0 - 1e-12))
        throw PreconditionError("energy radius " + format_real(r, 6) + " is below 4h = " + format_real(4.0 * g.h(), 6));
    const double min_dist = 0.5 * g.h() / kBallSubsamples;
    return integrate_ball_cells(g, z, r, [&](const CellLocation<Dim>& loc, const Point<Dim>& x) {
        const auto grad = interpolate_gradient(u, loc);
        const double q = dot<Dim>(grad, grad);
        if constexpr (Dim == 2) {
            return q;
        } else {
            return q / std::max(norm<Dim>(x - z), min_dist);
        }
    });
}

namespace detail {

// Nodes within the bounding box of B_r(z) where both parts are nonzero.
template <int Dim>
void require_disjoint(const ScalarField<Dim>& up, const ScalarField<Dim>& um, const Point<Dim>& z, double r) {
    const auto& g = up.grid();
    const double scale = std::max(up.max_abs(), um.max_abs());
    const double tol = 1e-12 * std::max(scale * scale, 1e-300);
    Index<Dim> lo, hi;
    index_range(g, z, r, lo, hi);
    std::size_t count = 0;
    Point<Dim> first{};
    for_each_in_range<Dim>(lo, hi, [&](const Index<Dim>& k) {
        const std::size_t i = g.ravel(k);
        if (std::abs(up[i] * um[i]) > tol) {
            if (count++ == 0) first = g.point(k);
        }
    });
    if (count > 0) {
        std::string p;
        for (int d = 0; d < Dim; ++d) p += (d ? "," : "") + format_real(first[d], 6);
        throw SupportOverlap("positive and negative parts overlap at " + std::to_string(count) +
                             " nodes near B_" + format_real(r, 6) + ", first at (" + p + ")");
    }
}

} // namespace detail

/// Phi(r) = r^-4 I(r, z, u+) I(r, z, u-).
template <int Dim>
double acf_phi(const ScalarField<Dim>& uplus, const ScalarField<Dim>& uminus, const Point<Dim>& z, double r) {
    detail::require_disjoint(uplus, uminus, z, r);
    return weighted_energy(uplus, z, r) * weighted_energy(uminus, z, r) / std::pow(r, 4);
}

} // namespace jumpfb
