#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "scalar_field.hpp"

namespace jumpfb {

// Shortest "%.{digits}g" rendering; used by every text output so files are
// byte-stable across runs.
inline std::string format_real(double v, int digits = 12) {
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Grid dump: header "dim h radius cells", then one node value per line in
/// row-major order.
template <int Dim>
void write_grid_dump(std::ostream& os, const ScalarField<Dim>& u) {
    const auto& g = u.grid();
    os << Dim << ' ' << format_real(g.h(), 17) << ' ' << format_real(g.radius(), 17) << ' ' << g.cells()
       << '\n';
    for (double v : u.values()) os << format_real(v, 17) << '\n';
}

template <int Dim>
ScalarField<Dim> read_grid_dump(std::istream& is) {
    int dim = 0, cells = 0;
    double h = 0.0, radius = 0.0;
    if (!(is >> dim >> h >> radius >> cells)) throw PreconditionError("grid dump: malformed header");
    if (dim != Dim) throw PreconditionError("grid dump: dimension mismatch");
    Grid<Dim> grid(radius, cells);
    if (std::abs(grid.h() - h) > 1e-12 * h) throw PreconditionError("grid dump: spacing inconsistent with header");
    ScalarField<Dim> u(grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(is >> u[i])) throw PreconditionError("grid dump: truncated value list");
    return u;
}

template <int Dim>
void save_grid_dump(const std::string& path, const ScalarField<Dim>& u) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_grid_dump(os, u);
    if (!os) throw Error("write failed for '" + path + "'");
}

} // namespace jumpfb
