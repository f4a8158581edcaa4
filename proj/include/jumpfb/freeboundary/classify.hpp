#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "../field/quadrature.hpp"
#include "../report/audit.hpp"

namespace jumpfb {

enum class PointClass { nondegenerate, degenerate };

inline const char* to_string(PointClass c) {
    return c == PointClass::nondegenerate ? "Nondegenerate" : "Degenerate";
}

struct Classification {
    PointClass label = PointClass::degenerate;
    std::vector<double> radii;
    std::vector<double> q;  // r^-(n/2+1) |u|_{L2(B_r(z))}
    double threshold = 0.0;
    double q_min = 0.0;

    AuditReport audit() const {
        AuditReport a;
        a.name = "fb-classify";
        a.add_series("r", radii).add_series("q", q).add("q_min", q_min).add("nondegenerate",
                                                                             label == PointClass::nondegenerate);
        a.tolerance = threshold;
        a.verdict = Verdict::pass;
        a.notes.push_back(std::string("classified ") + to_string(label));
        return a;
    }
};

/// Throws NotOnBoundary unless both signs of u occur at nodes within 2h of z.
template <int Dim>
void require_near_free_boundary(const ScalarField<Dim>& u, const Point<Dim>& z) {
    const auto& g = u.grid();
    const double reach = 2.0 * g.h() * (1.0 + 1e-12);
    bool pos = false, neg = false;
    const Index<Dim> c = g.nearest(z);
    Index<Dim> lo, hi;
    for (int d = 0; d < Dim; ++d) {
        lo[d] = std::max(0, c[d] - 3);
        hi[d] = std::min(g.cells(), c[d] + 3);
    }
    Index<Dim> k = lo;
    for (;;) {
        if (norm<Dim>(g.point(k) - z) <= reach) {
            const double v = u.at(k);
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
    if (!(pos && neg)) throw NotOnBoundary("no sign change of u within 2h of the classified point");
}

/// Dyadic radii r_max, r_max/2, ... down to (and including) the first value
/// not below 8h.
inline std::vector<double> dyadic_radii(double r_max, double h) {
    std::vector<double> out;
    for (double r = r_max; r >= 8.0 * h * (1.0 - 1e-12); r *= 0.5) out.push_back(r);
    return out;
}

/// Nondegenerate iff q(r) stays above eta0 on the measured range; eta0
/// defaults to threshold_fraction * q(r_max).
template <int Dim>
Classification classify_point(const ScalarField<Dim>& u, const Point<Dim>& z, std::vector<double> radii,
                              double threshold_fraction = 0.05) {
    require_near_free_boundary(u, z);
    if (radii.empty()) throw PreconditionError("radius list is empty");
    std::sort(radii.begin(), radii.end(), std::greater<>());
    for (double r : radii)
        if (r < 8.0 * u.grid().h() * (1.0 - 1e-12)) throw PreconditionError("classification radii must be at least 8h");
    Classification out;
    out.radii = radii;
    for (double r : radii) out.q.push_back(l2_ball_norm(u, z, r) / std::pow(r, 0.5 * Dim + 1.0));
    out.threshold = threshold_fraction * out.q.front();
    out.q_min = *std::min_element(out.q.begin(), out.q.end());
    out.label = out.q_min >= out.threshold && out.q.front() > 0.0 ? PointClass::nondegenerate : PointClass::degenerate;
    return out;
}

} // namespace jumpfb
