#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "calculus.hpp"
#include "io.hpp"

namespace jumpfb {

// Subsamples per axis used to resolve the ball indicator inside a cell.
inline constexpr int kBallSubsamples = 4;

struct WeightedNode {
    std::size_t index;
    double weight;  // volume of the node's dual cell inside the ball
};

namespace detail {

template <int Dim>
void require_ball_inside(const Grid<Dim>& g, const Point<Dim>& z, double r) {
    if (!(r > 0.0)) throw PreconditionError("ball radius must be positive");
    if (!g.contains_ball(z, r)) {
        std::string c;
        for (int d = 0; d < Dim; ++d) c += (d ? "," : "") + format_real(z[d], 6);
        throw PreconditionError("ball B_" + format_real(r, 6) + "((" + c + ")) exits the grid box");
    }
}

// Fraction of the axis-aligned box [lo, lo + side]^Dim inside B_r(z):
// exact 0/1 when the box is clearly inside or outside, otherwise midpoint
// subsampling with `sub` points per axis.
template <int Dim>
double box_fraction(const Point<Dim>& lo, double side, const Point<Dim>& z, double r, int sub) {
    double near2 = 0.0, far2 = 0.0;
    for (int d = 0; d < Dim; ++d) {
        const double a = lo[d] - z[d], b = a + side;
        const double n = (a > 0.0) ? a : (b < 0.0 ? -b : 0.0);
        const double f = std::max(std::abs(a), std::abs(b));
        near2 += n * n;
        far2 += f * f;
    }
    const double r2 = r * r;
    if (far2 <= r2) return 1.0;
    if (near2 >= r2) return 0.0;
    int inside = 0, total = 0;
    Index<Dim> j{};
    for (;;) {
        double d2 = 0.0;
        for (int d = 0; d < Dim; ++d) {
            const double x = lo[d] + (j[d] + 0.5) * side / sub - z[d];
            d2 += x * x;
        }
        inside += d2 <= r2;
        ++total;
        int d = Dim - 1;
        for (; d >= 0; --d) {
            if (++j[d] < sub) break;
            j[d] = 0;
        }
        if (d < 0) break;
    }
    return double(inside) / total;
}

template <int Dim>
void index_range(const Grid<Dim>& g, const Point<Dim>& z, double r, Index<Dim>& lo, Index<Dim>& hi) {
    for (int d = 0; d < Dim; ++d) {
        lo[d] = std::max(0, static_cast<int>(std::floor((z[d] - r + g.radius()) / g.h())) - 1);
        hi[d] = std::min(g.cells(), static_cast<int>(std::ceil((z[d] + r + g.radius()) / g.h())) + 1);
    }
}

template <int Dim, class F>
void for_each_in_range(const Index<Dim>& lo, const Index<Dim>& hi, F&& f) {
    Index<Dim> k = lo;
    for (;;) {
        f(k);
        int d = Dim - 1;
        for (; d >= 0; --d) {
            if (++k[d] <= hi[d]) break;
            k[d] = lo[d];
        }
        if (d < 0) return;
    }
}

} // namespace detail

/// Nodal quadrature weights for B_r(z): each node carries the volume of its
/// dual cell that falls inside the ball.
template <int Dim>
std::vector<WeightedNode> ball_node_weights(const Grid<Dim>& g, const Point<Dim>& z, double r,
                                            int sub = kBallSubsamples) {
    detail::require_ball_inside(g, z, r);
    const double h = g.h();
    const double vol = std::pow(h, Dim);
    Index<Dim> lo, hi;
    detail::index_range(g, z, r, lo, hi);
    std::vector<WeightedNode> out;
    detail::for_each_in_range<Dim>(lo, hi, [&](const Index<Dim>& k) {
        Point<Dim> corner = g.point(k);
        for (int d = 0; d < Dim; ++d) corner[d] -= 0.5 * h;
        const double f = detail::box_fraction<Dim>(corner, h, z, r, sub);
        if (f > 0.0) out.push_back({g.ravel(k), f * vol});
    });
    return out;
}

/// Midpoint-rule (integral of u^2 over B_r(z))^(1/2).
template <int Dim>
double l2_ball_norm(const ScalarField<Dim>& u, const Point<Dim>& z, double r) {
    double s = 0.0;
    for (const auto& w : ball_node_weights(u.grid(), z, r)) s += w.weight * u[w.index] * u[w.index];
    return std::sqrt(s);
}

/// Integrates f over B_r(z) with `sub`^Dim midpoint samples per cell.
/// f receives the cell location (for multilinear evaluation) and the
/// physical sample point; samples never coincide with grid nodes.
template <int Dim, class F>
double integrate_ball_cells(const Grid<Dim>& g, const Point<Dim>& z, double r, F&& f,
                            int sub = kBallSubsamples) {
    detail::require_ball_inside(g, z, r);
    const double h = g.h();
    const double sample_vol = std::pow(h / sub, Dim);
    const double r2 = r * r;
    Index<Dim> lo, hi;
    detail::index_range(g, z, r, lo, hi);
    for (int d = 0; d < Dim; ++d) hi[d] = std::min(hi[d], g.cells() - 1);
    double total = 0.0;
    detail::for_each_in_range<Dim>(lo, hi, [&](const Index<Dim>& cell) {
        const Point<Dim> corner = g.point(cell);
        double near2 = 0.0;
        for (int d = 0; d < Dim; ++d) {
            const double a = corner[d] - z[d], b = a + h;
            const double n = (a > 0.0) ? a : (b < 0.0 ? -b : 0.0);
            near2 += n * n;
        }
        if (near2 >= r2) return;
        CellLocation<Dim> loc;
        loc.corner = cell;
        Index<Dim> j{};
        for (;;) {
            Point<Dim> x;
            double d2 = 0.0;
            for (int d = 0; d < Dim; ++d) {
                loc.t[d] = (j[d] + 0.5) / sub;
                x[d] = corner[d] + loc.t[d] * h;
                d2 += (x[d] - z[d]) * (x[d] - z[d]);
            }
            if (d2 <= r2) total += sample_vol * f(loc, x);
            int d = Dim - 1;
            for (; d >= 0; --d) {
                if (++j[d] < sub) break;
                j[d] = 0;
            }
            if (d < 0) break;
        }
    });
    return total;
}

} // namespace jumpfb
