#pragma once

#include <cmath>

#include "../field/io.hpp"
#include "../field/scalar_field.hpp"

namespace jumpfb {

/// Radial C^2 bump (1 - |x-c|^2/R^2)^3 on B_R(c), zero outside.
template <int Dim>
struct BumpTest {
    Point<Dim> center{};
    double radius = 0.0;

    BumpTest() = default;
    BumpTest(const Point<Dim>& c, double r) : center(c), radius(r) {
        if (!(r > 0.0)) throw PreconditionError("bump radius must be positive");
    }

    double operator()(const Point<Dim>& x) const {
        const auto d = x - center;
        const double s = dot<Dim>(d, d) / (radius * radius);
        if (s >= 1.0) return 0.0;
        const double t = 1.0 - s;
        return t * t * t;
    }

    // Integral of the profile along a line through the centre.
    double line_integral() const { return radius * 32.0 / 35.0; }

    /// Requires the support to stay at least one cell away from the box
    /// boundary, so the bump vanishes on every boundary node.
    void require_inside(const Grid<Dim>& g) const {
        for (int d = 0; d < Dim; ++d)
            if (std::abs(center[d]) + radius > g.radius() - g.h() + 1e-12)
                throw PreconditionError("bump of radius " + format_real(radius, 6) +
                                        " is not compactly supported inside the grid box");
    }

    ScalarField<Dim> sample_on(const Grid<Dim>& g) const {
        require_inside(g);
        return sample<Dim>(g, [this](const Point<Dim>& x) { return (*this)(x); });
    }
};

} // namespace jumpfb
