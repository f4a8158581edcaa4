#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "../error.hpp"

namespace jumpfb {

// The extent is written as an expression so Dim is deduced from the grid or
// field argument rather than from the array type.
template <int Dim>
using Point = std::array<double, static_cast<std::size_t>(Dim)>;

template <int Dim>
using Index = std::array<int, static_cast<std::size_t>(Dim)>;

template <int Dim>
inline double dot(const Point<Dim>& a, const Point<Dim>& b) {
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) s += a[d] * b[d];
    return s;
}

template <int Dim>
inline double norm(const Point<Dim>& a) {
    return std::sqrt(dot<Dim>(a, a));
}

template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r;
    for (std::size_t d = 0; d < N; ++d) r[d] = a[d] - b[d];
    return r;
}

template <std::size_t N>
inline std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r;
    for (std::size_t d = 0; d < N; ++d) r[d] = a[d] + b[d];
    return r;
}

template <std::size_t N>
inline std::array<double, N> operator*(double s, const std::array<double, N>& a) {
    std::array<double, N> r;
    for (std::size_t d = 0; d < N; ++d) r[d] = s * a[d];
    return r;
}

template <int Dim>
inline Point<Dim> unit_axis(int axis) {
    Point<Dim> e{};
    e[axis] = 1.0;
    return e;
}

/// Uniform lattice on the closed box [-radius, radius]^Dim.
///
/// Node k (per axis, 0..cells) sits at (k - cells/2) * h, so the origin is
/// always a node. Linear indices are row-major: axis 0 varies slowest.
template <int Dim>
class Grid {
    static_assert(Dim == 2 || Dim == 3, "only 2-d and 3-d grids are supported");

public:
    static constexpr int dim = Dim;

    Grid(double radius, int cells) : radius_(radius), cells_(cells) {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw PreconditionError("grid radius must be positive and finite");
        if (cells < 16)
            throw PreconditionError("cells_per_side must be at least 16, got " + std::to_string(cells));
        if (cells % 2 != 0)
            throw PreconditionError("cells_per_side must be even so the origin is a node, got " +
                                    std::to_string(cells));
        h_ = 2.0 * radius / cells;
        std::size_t n = 1;
        for (int d = 0; d < Dim; ++d) {
            stride_[Dim - 1 - d] = n;
            n *= static_cast<std::size_t>(cells + 1);
        }
        size_ = n;
    }

    double radius() const noexcept { return radius_; }
    double h() const noexcept { return h_; }
    int cells() const noexcept { return cells_; }
    int nodes_per_side() const noexcept { return cells_ + 1; }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const noexcept { return stride_[axis]; }
    int half() const noexcept { return cells_ / 2; }

    double coord(int k) const noexcept { return (k - cells_ / 2) * h_; }

    Point<Dim> point(const Index<Dim>& k) const noexcept {
        Point<Dim> x;
        for (int d = 0; d < Dim; ++d) x[d] = coord(k[d]);
        return x;
    }

    Point<Dim> point(std::size_t i) const noexcept { return point(unravel(i)); }

    std::size_t ravel(const Index<Dim>& k) const noexcept {
        std::size_t i = 0;
        for (int d = 0; d < Dim; ++d) i += static_cast<std::size_t>(k[d]) * stride_[d];
        return i;
    }

    Index<Dim> unravel(std::size_t i) const noexcept {
        Index<Dim> k;
        for (int d = 0; d < Dim; ++d) {
            k[d] = static_cast<int>(i / stride_[d]);
            i -= static_cast<std::size_t>(k[d]) * stride_[d];
        }
        return k;
    }

    bool on_boundary(const Index<Dim>& k) const noexcept {
        for (int d = 0; d < Dim; ++d)
            if (k[d] == 0 || k[d] == cells_) return true;
        return false;
    }

    // Nearest node (clamped to the box).
    Index<Dim> nearest(const Point<Dim>& x) const noexcept {
        Index<Dim> k;
        for (int d = 0; d < Dim; ++d) {
            int v = static_cast<int>(std::lround(x[d] / h_)) + cells_ / 2;
            k[d] = v < 0 ? 0 : (v > cells_ ? cells_ : v);
        }
        return k;
    }

    bool contains_ball(const Point<Dim>& z, double r) const noexcept {
        const double slack = 1e-12 * radius_;
        for (int d = 0; d < Dim; ++d)
            if (std::abs(z[d]) + r > radius_ + slack) return false;
        return true;
    }

    // Calls f(Index) for every node, row-major.
    template <class F>
    void for_each_node(F&& f) const {
        Index<Dim> k{};
        for (std::size_t i = 0; i < size_; ++i) {
            f(k, i);
            for (int d = Dim - 1; d >= 0; --d) {
                if (++k[d] <= cells_) break;
                k[d] = 0;
            }
        }
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.radius_ == b.radius_ && a.cells_ == b.cells_;
    }

private:
    double radius_;
    int cells_;
    double h_ = 0.0;
    std::size_t size_ = 0;
    std::array<std::size_t, Dim> stride_{};
};

template <int Dim>
Grid<Dim> build_grid(double radius, int cells_per_side) {
    return Grid<Dim>(radius, cells_per_side);
}

} // namespace jumpfb
