#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "../field/io.hpp"
#include "../field/scalar_field.hpp"

namespace jumpfb {

/// Polyline (2-d segments) or triangle (3-d) approximation of {u = level}.
/// Every vertex is the linear root on a grid edge whose endpoints straddle
/// the level.
template <int Dim>
struct LevelSetCurve {
    double level = 0.0;
    std::vector<Point<Dim>> vertices;
    std::vector<std::array<std::size_t, Dim>> elements;

    bool empty() const noexcept { return elements.empty(); }

    double element_measure(std::size_t e) const {
        const auto& el = elements[e];
        if constexpr (Dim == 2) {
            return norm<2>(vertices[el[1]] - vertices[el[0]]);
        } else {
            const auto a = vertices[el[1]] - vertices[el[0]], b = vertices[el[2]] - vertices[el[0]];
            const Point<3> c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
            return 0.5 * norm<3>(c);
        }
    }

    Point<Dim> element_centroid(std::size_t e) const {
        Point<Dim> c{};
        for (std::size_t v : elements[e]) c = c + vertices[v];
        return (1.0 / Dim) * c;
    }

    /// Total length (2-d) or area (3-d).
    double measure() const {
        double s = 0.0;
        for (std::size_t e = 0; e < elements.size(); ++e) s += element_measure(e);
        return s;
    }

    // One row per element vertex: segment,vertex,x,y[,z]
    void write_csv(std::ostream& os) const {
        os << "segment,vertex,x,y" << (Dim == 3 ? ",z" : "") << '\n';
        for (std::size_t e = 0; e < elements.size(); ++e)
            for (std::size_t v : elements[e]) {
                os << e << ',' << v;
                for (int d = 0; d < Dim; ++d) os << ',' << format_real(vertices[v][d]);
                os << '\n';
            }
    }
};

namespace detail {

// Shared vertex table keyed by grid edge (node index, axis).
template <int Dim>
class EdgeVertices {
public:
    EdgeVertices(const ScalarField<Dim>& u, double level, LevelSetCurve<Dim>& out)
        : u_(u), level_(level), out_(out) {}

    std::size_t get(std::size_t node, int axis) {
        const std::size_t key = node * Dim + axis;
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        const auto& g = u_.grid();
        const double a = u_[node] - level_, b = u_[node + g.stride(axis)] - level_;
        const double t = a / (a - b);
        Point<Dim> x = g.point(node);
        x[axis] += t * g.h();
        out_.vertices.push_back(x);
        map_.emplace(key, out_.vertices.size() - 1);
        return out_.vertices.size() - 1;
    }

private:
    const ScalarField<Dim>& u_;
    double level_;
    LevelSetCurve<Dim>& out_;
    std::unordered_map<std::size_t, std::size_t> map_;
};

// Marching squares on one square with corners c[0..3] in counter-clockwise
// order and edges e[k] joining c[k] and c[k+1]. Emits pairs of crossed edge
// ids. Saddles separate the corners whose sign disagrees with the average.
template <class Emit>
void march_square(const std::array<double, 4>& v, Emit&& emit) {
    const auto in = [&](int k) { return v[k] > 0.0; };
    const auto crossed = [&](int k) { return in(k) != in((k + 1) % 4); };
    std::array<int, 4> cut{};
    int n = 0;
    for (int k = 0; k < 4; ++k)
        if (crossed(k)) cut[n++] = k;
    if (n == 2) {
        emit(cut[0], cut[1]);
    } else if (n == 4) {
        const bool centre = (v[0] + v[1] + v[2] + v[3]) > 0.0;
        // corner k is bounded by edges k-1 and k
        for (int k = 0; k < 4; ++k)
            if (in(k) != centre) emit((k + 3) % 4, k);
    }
}

inline void march_2d(const ScalarField<2>& u, double level, LevelSetCurve<2>& out) {
    const auto& g = u.grid();
    EdgeVertices<2> table(u, level, out);
    const std::size_t s0 = g.stride(0), s1 = g.stride(1);
    for (int a = 0; a < g.cells(); ++a)
        for (int b = 0; b < g.cells(); ++b) {
            const std::size_t i = g.ravel({a, b});
            const std::array<std::size_t, 4> node{i, i + s0, i + s0 + s1, i + s1};
            // edges: (c0,c1) axis 0 at c0, (c1,c2) axis 1 at c1, (c3,c2) axis 0 at c3, (c0,c3) axis 1 at c0
            const std::array<std::pair<std::size_t, int>, 4> edge{
                std::pair{node[0], 0}, std::pair{node[1], 1}, std::pair{node[3], 0}, std::pair{node[0], 1}};
            std::array<double, 4> v;
            for (int k = 0; k < 4; ++k) v[k] = u[node[k]] - level;
            march_square(v, [&](int e0, int e1) {
                const std::size_t p = table.get(edge[e0].first, edge[e0].second);
                const std::size_t q = table.get(edge[e1].first, edge[e1].second);
                out.elements.push_back({p, q});
            });
        }
}

// 3-d: marching squares on each face of every cube, then the face segments
// are joined into loops (each crossed cube edge lies on two faces) and every
// loop is fan-triangulated from its first vertex. Shared faces are resolved
// identically from both sides, so the surface is closed.
inline void march_3d(const ScalarField<3>& u, double level, LevelSetCurve<3>& out) {
    const auto& g = u.grid();
    EdgeVertices<3> table(u, level, out);
    // faces of the unit cube as (fixed axis, fixed side, axis a, axis b)
    struct Face {
        int fixed, side, a, b;
    };
    const std::array<Face, 6> faces{Face{0, 0, 1, 2}, Face{0, 1, 1, 2}, Face{1, 0, 0, 2},
                                    Face{1, 1, 0, 2}, Face{2, 0, 0, 1}, Face{2, 1, 0, 1}};
    std::vector<std::pair<std::size_t, std::size_t>> segs;
    const int n = g.cells();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                const Index<3> base{x, y, z};
                segs.clear();
                for (const auto& f : faces) {
                    Index<3> c0 = base;
                    c0[f.fixed] += f.side;
                    auto corner = [&](int da, int db) {
                        Index<3> k = c0;
                        k[f.a] += da;
                        k[f.b] += db;
                        return g.ravel(k);
                    };
                    const std::array<std::size_t, 4> node{corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)};
                    const std::array<std::pair<std::size_t, int>, 4> edge{
                        std::pair{node[0], f.a}, std::pair{node[1], f.b}, std::pair{node[3], f.a},
                        std::pair{node[0], f.b}};
                    std::array<double, 4> v;
                    for (int k = 0; k < 4; ++k) v[k] = u[node[k]] - level;
                    march_square(v, [&](int e0, int e1) {
                        segs.emplace_back(table.get(edge[e0].first, edge[e0].second),
                                          table.get(edge[e1].first, edge[e1].second));
                    });
                }
                // chain segments into loops
                std::vector<char> used(segs.size(), 0);
                for (std::size_t s = 0; s < segs.size(); ++s) {
                    if (used[s]) continue;
                    used[s] = 1;
                    std::vector<std::size_t> loop{segs[s].first, segs[s].second};
                    for (bool grown = true; grown;) {
                        grown = false;
                        for (std::size_t t = 0; t < segs.size(); ++t) {
                            if (used[t]) continue;
                            if (segs[t].first == loop.back() || segs[t].second == loop.back()) {
                                const std::size_t next = segs[t].first == loop.back() ? segs[t].second : segs[t].first;
                                used[t] = 1;
                                grown = true;
                                if (next != loop.front()) loop.push_back(next);
                                break;
                            }
                        }
                    }
                    for (std::size_t k = 1; k + 1 < loop.size(); ++k)
                        out.elements.push_back({loop[0], loop[k], loop[k + 1]});
                }
            }
}

template <int Dim>
void drop_degenerate(LevelSetCurve<Dim>& c, double h) {
    std::vector<std::array<std::size_t, Dim>> kept;
    const double min = Dim == 2 ? 1e-12 * h : 1e-24 * h * h;
    for (std::size_t e = 0; e < c.elements.size(); ++e)
        if (c.element_measure(e) > min) kept.push_back(c.elements[e]);
    c.elements = std::move(kept);
}

} // namespace detail

/// Marching squares (2-d) or face-consistent marching cubes (3-d) for
/// {u = level} with linear edge interpolation.
template <int Dim>
LevelSetCurve<Dim> extract_level_set(const ScalarField<Dim>& u, double level) {
    LevelSetCurve<Dim> out;
    out.level = level;
    if constexpr (Dim == 2)
        detail::march_2d(u, level, out);
    else
        detail::march_3d(u, level, out);
    detail::drop_degenerate(out, u.grid().h());
    return out;
}

/// Total measure of the zero level set inside the ball of the grid radius.
template <int Dim>
double perimeter_diagnostic(const ScalarField<Dim>& u) {
    const auto c = extract_level_set(u, 0.0);
    const double R = u.grid().radius() * (1.0 + 1e-12);
    double s = 0.0;
    for (std::size_t e = 0; e < c.elements.size(); ++e)
        if (norm<Dim>(c.element_centroid(e)) <= R) s += c.element_measure(e);
    return s;
}

/// Fraction of vertices with both signs of u within distance 3h.
template <int Dim>
double two_sided_fraction(const ScalarField<Dim>& u, const LevelSetCurve<Dim>& c) {
    if (c.vertices.empty()) return 1.0;
    const auto& g = u.grid();
    const double reach = 3.0 * g.h();
    std::size_t ok = 0;
    for (const auto& x : c.vertices) {
        bool pos = false, neg = false;
        Index<Dim> lo, hi;
        for (int d = 0; d < Dim; ++d) {
            lo[d] = std::max(0, static_cast<int>(std::floor((x[d] - reach + g.radius()) / g.h())));
            hi[d] = std::min(g.cells(), static_cast<int>(std::ceil((x[d] + reach + g.radius()) / g.h())));
        }
        Index<Dim> k = lo;
        for (;;) {
            if (norm<Dim>(g.point(k) - x) <= reach) {
                const double v = u.at(k) - c.level;
                pos = pos || v > 0.0;
                neg = neg || v <= 0.0;
            }
            int d = Dim - 1;
            for (; d >= 0; --d) {
                if (++k[d] <= hi[d]) break;
                k[d] = lo[d];
            }
            if (d < 0) break;
        }
        ok += pos && neg;
    }
    return double(ok) / c.vertices.size();
}

} // namespace jumpfb
