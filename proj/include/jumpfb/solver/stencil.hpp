#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "../field/grid.hpp"

namespace jumpfb {

/// Bare index space of an (n+1)^Dim node lattice. Unlike Grid it allows the
/// tiny sizes multigrid coarse levels need.
template <int Dim>
struct Lattice {
    int cells = 0;
    std::size_t size = 0;
    std::array<std::size_t, Dim> stride{};

    explicit Lattice(int n = 0) : cells(n) {
        std::size_t s = 1;
        for (int d = Dim - 1; d >= 0; --d) {
            stride[d] = s;
            s *= static_cast<std::size_t>(n + 1);
        }
        size = s;
    }

    Index<Dim> unravel(std::size_t i) const {
        Index<Dim> k;
        for (int d = 0; d < Dim; ++d) {
            k[d] = static_cast<int>(i / stride[d]);
            i -= static_cast<std::size_t>(k[d]) * stride[d];
        }
        return k;
    }
    std::size_t ravel(const Index<Dim>& k) const {
        std::size_t i = 0;
        for (int d = 0; d < Dim; ++d) i += static_cast<std::size_t>(k[d]) * stride[d];
        return i;
    }
    bool on_boundary(const Index<Dim>& k) const {
        for (int d = 0; d < Dim; ++d)
            if (k[d] == 0 || k[d] == cells) return true;
        return false;
    }
};

/// Symmetric nodal operator
///   (A x)_i = sum_edges K_e (x_i - x_j) + cross-derivative cell terms
/// restricted to free rows. Every box-boundary node must be fixed, so free
/// rows always have a full set of neighbours.
template <int Dim>
struct StencilOperator {
    Lattice<Dim> lattice;
    // face[d][i]: coefficient of the edge from node i to node i + e_d
    std::array<std::vector<double>, Dim> face;
    std::vector<char> fixed;
    // Optional cell-based mixed terms, indexed by the cell's lower-corner
    // node. cross[p] holds the (d,e) pair p (d<e) already scaled by
    // h^(Dim-2) / 2^Dim.
    static constexpr int kPairs = Dim * (Dim - 1) / 2;
    std::array<std::vector<double>, kPairs> cross;
    bool has_cross = false;

    explicit StencilOperator(int cells = 0) : lattice(cells) {
        for (auto& f : face) f.assign(lattice.size, 0.0);
        fixed.assign(lattice.size, 0);
    }

    static constexpr int pair_index(int d, int e) {
        if (d > e) std::swap(d, e);
        // (0,1)->0, (0,2)->1, (1,2)->2
        return d * (2 * Dim - d - 1) / 2 + (e - d - 1);
    }

    void mark_box_boundary() {
        for (std::size_t i = 0; i < lattice.size; ++i)
            if (lattice.on_boundary(lattice.unravel(i))) fixed[i] = 1;
    }

    double diagonal(std::size_t i) const {
        double s = 0.0;
        for (int d = 0; d < Dim; ++d) s += face[d][i] + face[d][i - lattice.stride[d]];
        return s;
    }

    // y = A x on free rows, 0 on fixed rows.
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const std::size_t n = lattice.size;
        y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (fixed[i]) continue;
            double acc = 0.0;
            const double xi = x[i];
            for (int d = 0; d < Dim; ++d) {
                const std::size_t s = lattice.stride[d];
                acc += face[d][i] * (xi - x[i + s]) + face[d][i - s] * (xi - x[i - s]);
            }
            y[i] = acc;
        }
        if (has_cross) apply_cross(x, y);
    }

private:
    void apply_cross(const std::vector<double>& x, std::vector<double>& y) const {
        const int n = lattice.cells;
        Index<Dim> k{};
        std::array<std::size_t, (1u << Dim)> node{};
        for (;;) {
            const std::size_t base = lattice.ravel(k);
            for (unsigned m = 0; m < (1u << Dim); ++m) {
                std::size_t off = 0;
                for (int d = 0; d < Dim; ++d)
                    if (m & (1u << d)) off += lattice.stride[d];
                node[m] = base + off;
            }
            for (unsigned c = 0; c < (1u << Dim); ++c) {
                std::array<double, Dim> diff;
                for (int d = 0; d < Dim; ++d)
                    diff[d] = x[node[c | (1u << d)]] - x[node[c & ~(1u << d)]];
                for (int e = 0; e < Dim; ++e) {
                    double flux = 0.0;
                    for (int d = 0; d < Dim; ++d)
                        if (d != e) flux += cross[pair_index(d, e)][base] * diff[d];
                    if (flux == 0.0) continue;
                    const std::size_t hi = node[c | (1u << e)], lo = node[c & ~(1u << e)];
                    if (!fixed[hi]) y[hi] += flux;
                    if (!fixed[lo]) y[lo] -= flux;
                }
            }
            int d = Dim - 1;
            for (; d >= 0; --d) {
                if (++k[d] < n) break;
                k[d] = 0;
            }
            if (d < 0) break;
        }
    }
};

} // namespace jumpfb
