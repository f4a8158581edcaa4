#pragma once

#include <cmath>
#include <vector>

#include "scalar_field.hpp"

namespace jumpfb {

template <int Dim>
using VectorField = std::vector<Point<Dim>>;

/// Nodal gradient: central differences in the interior, first-order
/// one-sided differences on the box faces. Exact on affine fields.
template <int Dim>
VectorField<Dim> gradient_field(const ScalarField<Dim>& u) {
    const auto& g = u.grid();
    const double h = g.h();
    VectorField<Dim> grad(g.size());
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        for (int d = 0; d < Dim; ++d) {
            const std::size_t s = g.stride(d);
            if (k[d] == 0)
                grad[i][d] = (u[i + s] - u[i]) / h;
            else if (k[d] == g.cells())
                grad[i][d] = (u[i] - u[i - s]) / h;
            else
                grad[i][d] = (u[i + s] - u[i - s]) / (2.0 * h);
        }
    });
    return grad;
}

/// Cell lookup for multilinear interpolation: lower-corner node index and
/// local coordinates in [0,1]^Dim. Points outside the box are clamped.
template <int Dim>
struct CellLocation {
    Index<Dim> corner;
    Point<Dim> t;
};

template <int Dim>
CellLocation<Dim> locate(const Grid<Dim>& g, const Point<Dim>& x) {
    CellLocation<Dim> loc;
    for (int d = 0; d < Dim; ++d) {
        double s = (x[d] + g.radius()) / g.h();
        int c = static_cast<int>(std::floor(s));
        if (c < 0) c = 0;
        if (c > g.cells() - 1) c = g.cells() - 1;
        double t = s - c;
        loc.corner[d] = c;
        loc.t[d] = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }
    return loc;
}

namespace detail {

template <int Dim>
std::size_t corner_offset(const Grid<Dim>& g, unsigned mask) {
    std::size_t off = 0;
    for (int d = 0; d < Dim; ++d)
        if (mask & (1u << d)) off += g.stride(d);
    return off;
}

} // namespace detail

template <int Dim>
double interpolate(const ScalarField<Dim>& u, const CellLocation<Dim>& loc) {
    const auto& g = u.grid();
    const std::size_t base = g.ravel(loc.corner);
    double v = 0.0;
    for (unsigned m = 0; m < (1u << Dim); ++m) {
        double w = 1.0;
        for (int d = 0; d < Dim; ++d) w *= (m & (1u << d)) ? loc.t[d] : 1.0 - loc.t[d];
        v += w * u[base + detail::corner_offset(g, m)];
    }
    return v;
}

template <int Dim>
double interpolate(const ScalarField<Dim>& u, const Point<Dim>& x) {
    return interpolate(u, locate(u.grid(), x));
}

/// Gradient of the cellwise multilinear interpolant.
template <int Dim>
Point<Dim> interpolate_gradient(const ScalarField<Dim>& u, const CellLocation<Dim>& loc) {
    const auto& g = u.grid();
    const std::size_t base = g.ravel(loc.corner);
    Point<Dim> grad{};
    for (unsigned m = 0; m < (1u << Dim); ++m) {
        const double val = u[base + detail::corner_offset(g, m)];
        for (int a = 0; a < Dim; ++a) {
            double w = (m & (1u << a)) ? 1.0 : -1.0;
            for (int d = 0; d < Dim; ++d)
                if (d != a) w *= (m & (1u << d)) ? loc.t[d] : 1.0 - loc.t[d];
            grad[a] += w * val;
        }
    }
    for (int a = 0; a < Dim; ++a) grad[a] /= g.h();
    return grad;
}

template <int Dim>
Point<Dim> interpolate_gradient(const ScalarField<Dim>& u, const Point<Dim>& x) {
    return interpolate_gradient(u, locate(u.grid(), x));
}

} // namespace jumpfb
