#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "../field/coefficient.hpp"
#include "../field/io.hpp"
#include "../field/quadrature.hpp"
#include "../report/audit.hpp"
#include "cap.hpp"
#include "energy.hpp"
#include "modulus.hpp"

namespace jumpfb {

inline constexpr double kDefaultC0 = 10.0;

template <int Dim>
struct RadialReport {
    Point<Dim> center{};
    std::vector<double> radii;
    std::vector<double> Iplus, Iminus, phi, phi_corrected;
    std::vector<double> beta_plus, beta_minus;  // NaN in 3-d or when a phase misses the circle
    double cbar = 0.0;

    void write_csv(std::ostream& os) const {
        os << "r,Iplus,Iminus,phi,phi_corrected,beta_plus,beta_minus\n";
        for (std::size_t i = 0; i < radii.size(); ++i)
            os << format_real(radii[i]) << ',' << format_real(Iplus[i]) << ',' << format_real(Iminus[i]) << ','
               << format_real(phi[i]) << ',' << format_real(phi_corrected[i]) << ',' << format_real(beta_plus[i])
               << ',' << format_real(beta_minus[i]) << '\n';
    }
};

struct MonotonicityOptions {
    double cbar = 4.0 * kDefaultC0;
    double tol_factor = 0.1;
    bool caps = true;  // 2-d only
};

template <int Dim>
struct MonotonicityResult {
    RadialReport<Dim> report;
    std::vector<double> differences;  // successive differences of phi_corrected
    double delta_tol = 0.0;
    double minimal_cbar = 0.0;  // smallest c making the curve nondecreasing
    std::vector<double> bound_ratio;  // Phi(r) / (|u+|^2 |u-|^2) on the largest ball about z
    double bound_ratio_max = 0.0;
    double bound_radius = 0.0;
    Verdict verdict = Verdict::na;
    std::vector<std::string> notes;

    AuditReport audit(const std::string& name = "acf-monotonicity") const {
        AuditReport a;
        a.name = name;
        a.add_series("r", report.radii)
            .add_series("phi", report.phi)
            .add_series("phi_corrected", report.phi_corrected)
            .add("cbar", report.cbar)
            .add("minimal_cbar", minimal_cbar)
            .add("min_difference",
                 differences.empty() ? 0.0 : *std::min_element(differences.begin(), differences.end()))
            .add("bound_ratio_max", bound_ratio_max)
            .add("bound_radius", bound_radius);
        a.tolerance = delta_tol;
        a.verdict = verdict;
        a.notes = notes;
        return a;
    }
};

template <int Dim>
void check_radii(const Grid<Dim>& g, const Point<Dim>& z, const std::vector<double>& radii) {
    if (radii.empty()) throw PreconditionError("radius list is empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        if (i > 0 && !(r > radii[i - 1])) throw PreconditionError("radii must be strictly increasing");
        if (r < 4.0 * g.h() * (1.0 - 1e-12)) throw PreconditionError("radius " + format_real(r, 6) + " is below 4h");
        if (r > g.radius() - 2.0 * g.h() + 1e-12)
            throw PreconditionError("radius " + format_real(r, 6) + " exceeds the grid radius minus 2h");
        if (!g.contains_ball(z, r))
            throw PreconditionError("ball of radius " + format_real(r, 6) + " about the centre leaves the grid");
    }
}

/// Smallest c >= 0 that makes e^{c g} Phi nondecreasing. For each pair the curve
/// e^{c g} Phi is nondecreasing iff c >= -(ln Phi_{i+1} - ln Phi_i) / (g_{i+1} - g_i).
inline double minimal_correction(const std::vector<double>& phi, const std::vector<double>& g) {
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        if (phi[i + 1] >= phi[i]) continue;
        if (phi[i + 1] <= 0.0) return std::numeric_limits<double>::infinity();
        const double dg = g[i + 1] - g[i];
        if (dg <= 0.0) return std::numeric_limits<double>::infinity();
        c = std::max(c, -(std::log(phi[i + 1]) - std::log(phi[i])) / dg);
    }
    return c;
}

/// Radial ACF profile of u about z with the Dini correction e^{cbar g(r)}.
template <int Dim>
MonotonicityResult<Dim> monotonicity_audit(const ScalarField<Dim>& u, const ModulusOfContinuity& modulus,
                                           const Point<Dim>& z, const std::vector<double>& radii,
                                           const MonotonicityOptions& opt = {}) {
    const auto& grid = u.grid();
    check_radii(grid, z, radii);
    const auto up = positive_part(u), um = negative_part(u);
    MonotonicityResult<Dim> out;
    auto& rep = out.report;
    rep.center = z;
    rep.radii = radii;
    rep.cbar = opt.cbar;
    std::vector<double> gval;
    for (double r : radii) {
        const double ip = weighted_energy(up, z, r), im = weighted_energy(um, z, r);
        const double phi = ip * im / std::pow(r, 4);
        const double gr = r < 1.0 ? modulus_psi_g(modulus, r).g : modulus_psi_g(modulus, 1.0 - 1e-15).g;
        rep.Iplus.push_back(ip);
        rep.Iminus.push_back(im);
        rep.phi.push_back(phi);
        rep.phi_corrected.push_back(std::exp(opt.cbar * gr) * phi);
        gval.push_back(gr);
        double bp = std::numeric_limits<double>::quiet_NaN(), bm = bp;
        if constexpr (Dim == 2) {
            if (opt.caps) {
                try {
                    bp = cap_characteristic(u, z, r, +1).beta;
                } catch (const EmptyCap&) {
                }
                try {
                    bm = cap_characteristic(u, z, r, -1).beta;
                } catch (const EmptyCap&) {
                }
            }
        }
        rep.beta_plus.push_back(bp);
        rep.beta_minus.push_back(bm);
    }
    const double phimax = *std::max_element(rep.phi.begin(), rep.phi.end());
    out.delta_tol = opt.tol_factor * std::sqrt(grid.h()) * phimax;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        const double d = rep.phi_corrected[i + 1] - rep.phi_corrected[i];
        out.differences.push_back(d);
        ok = ok && d >= -out.delta_tol;
    }
    out.minimal_cbar = minimal_correction(rep.phi, gval);

    // largest ball about z inside the box, capped at the unit ball
    double rb = 1.0;
    for (int d = 0; d < Dim; ++d) rb = std::min(rb, grid.radius() - std::abs(z[d]));
    out.bound_radius = rb;
    const double np = l2_ball_norm(up, z, rb), nm = l2_ball_norm(um, z, rb);
    const double denom = np * np * nm * nm;
    for (double phi : rep.phi) out.bound_ratio.push_back(denom > 0.0 ? phi / denom : 0.0);
    out.bound_ratio_max = *std::max_element(out.bound_ratio.begin(), out.bound_ratio.end());
    if (rb < 1.0) out.notes.push_back("bound ratio uses B_" + format_real(rb, 6) + " instead of B_1");
    if (phimax == 0.0) out.notes.push_back("one phase has zero energy; Phi vanishes identically");
    out.verdict = ok ? Verdict::pass : Verdict::fail;
    return out;
}

} // namespace jumpfb
