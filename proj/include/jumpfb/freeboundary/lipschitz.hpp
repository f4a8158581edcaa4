#pragma once

#include <cmath>

#include "../field/calculus.hpp"
#include "../field/quadrature.hpp"
#include "../report/audit.hpp"

namespace jumpfb {

struct LipschitzResult {
    double ratio = 0.0;  // sup_D |grad u| d^(n/2+1) / |u|_{L2(Omega)}
    double sup_gradient = 0.0;
    double l2_norm = 0.0;
    double distance = 0.0;
};

/// D = B_rho(0), Omega = B_R(0) with R the grid radius, d = R - rho. The
/// gradient is taken at the centres of cells whose centre lies in D.
template <int Dim>
LipschitzResult lipschitz_audit(const ScalarField<Dim>& u, double rho) {
    const auto& g = u.grid();
    LipschitzResult out;
    out.distance = g.radius() - rho;
    if (!(rho > 0.0) || out.distance < 8.0 * g.h() * (1.0 - 1e-12))
        throw PreconditionError("sub-ball must stay at least 8h from the domain boundary");
    out.l2_norm = l2_ball_norm(u, Point<Dim>{}, g.radius());
    if (out.l2_norm == 0.0) return out;
    CellLocation<Dim> loc;
    for (int d = 0; d < Dim; ++d) loc.t[d] = 0.5;
    g.for_each_node([&](const Index<Dim>& k, std::size_t) {
        Point<Dim> c = g.point(k);
        for (int d = 0; d < Dim; ++d) {
            if (k[d] == g.cells()) return;
            c[d] += 0.5 * g.h();
        }
        if (norm<Dim>(c) > rho) return;
        loc.corner = k;
        out.sup_gradient = std::max(out.sup_gradient, norm<Dim>(interpolate_gradient(u, loc)));
    });
    out.ratio = out.sup_gradient * std::pow(out.distance, 0.5 * Dim + 1.0) / out.l2_norm;
    return out;
}

/// Relative spread (max - min) / max of the ratios across a refinement
/// sequence.
inline AuditReport lipschitz_report(const std::vector<double>& h, const std::vector<double>& ratios,
                                    double tolerance = 0.10) {
    AuditReport a;
    a.name = "fb-lipschitz";
    a.add_series("h", h).add_series("ratio", ratios);
    double lo = INFINITY, hi = 0.0;
    for (double r : ratios) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    a.add("spread", spread);
    a.tolerance = tolerance;
    a.verdict = spread <= tolerance ? Verdict::pass : Verdict::fail;
    return a;
}

} // namespace jumpfb
