#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "../field/io.hpp"
#include "../freeboundary/level_set.hpp"
#include "../report/audit.hpp"
#include "harmonic.hpp"
#include "two_plane.hpp"

namespace jumpfb {

template <int Dim>
struct FlatnessEntry {
    int k = 0;
    double scale = 0.0;         // s_k = r0 rbar^k
    Point<Dim> nu{};            // unit direction
    Point<Dim> nu_raw{};        // unnormalised nu^k of the update rule
    double beta = 0.0;          // beta |nu_raw|, slope of the equivalent unit-normal profile
    double deficit = 0.0;       // s_k^(-n/2) |u - P_{beta, nu_raw}|_{L2(B_{s_k}(z))}
    double bound = 0.0;         // eps rbar^(k(1 + alpha/2))
    double gradient = 0.0;      // |grad h_k(0)|
};

template <int Dim>
struct FlatnessTrace {
    double rbar = 0.25;
    double alpha = 0.5;
    double eps = 0.0;
    double c0 = 0.0;            // empirical max |grad h_k(0)|
    std::vector<FlatnessEntry<Dim>> entries;
    std::vector<double> drift, drift_bound;  // per step k -> k+1
    bool decay_ok = true;
    bool drift_ok = true;
    bool flat = false;  // eps at or below the flatness floor; decay is not measurable
    std::vector<std::string> notes;

    Verdict verdict() const {
        if (flat) return Verdict::na;
        return decay_ok && drift_ok ? Verdict::pass : Verdict::fail;
    }

    void write_csv(std::ostream& os) const {
        os << "k";
        for (int d = 0; d < Dim; ++d) os << ",nu" << d;
        os << ",deficit,bound\n";
        for (const auto& e : entries) {
            os << e.k;
            for (int d = 0; d < Dim; ++d) os << ',' << format_real(e.nu[d]);
            os << ',' << format_real(e.deficit) << ',' << format_real(e.bound) << '\n';
        }
    }

    AuditReport audit() const {
        AuditReport a;
        a.name = "blowup-cascade";
        std::vector<double> d, b;
        for (const auto& e : entries) {
            d.push_back(e.deficit);
            b.push_back(e.bound);
        }
        a.add("rbar", rbar).add("alpha", alpha).add("eps", eps).add("c0", c0);
        a.add_series("deficit", d).add_series("bound", b).add_series("drift", drift).add_series("drift_bound",
                                                                                                 drift_bound);
        a.tolerance = eps;
        a.verdict = verdict();
        a.notes = notes;
        return a;
    }
};

struct CascadeOptions {
    double rbar = 0.25;
    double alpha = 0.5;
    int steps = 8;
    int unit_cells = 64;       // resolution of the rescaled unit-ball grid
    double floor_cells = 16;   // stop once s_k < floor_cells * h
    double flat_floor = 1e-3;  // eps <= flat_floor * beta counts as already flat
};

/// Flatness-improvement iteration about z starting from `initial`:
///   w_k = (broken(u_k) - beta x.nu^k) / (eps rbar^(k alpha)),  u_k(x) = u(s_k x + z) / s_k,
///   nu^{k+1} = nu^k + eps rbar^(k alpha) beta^-1 grad h_k(0),
/// with h_k the harmonic replacement of w_k and eps the measured deficit at
/// k = 0. Deficits are evaluated on the original grid.
template <int Dim>
FlatnessTrace<Dim> flatness_cascade(const ScalarField<Dim>& u, const Point<Dim>& z, const TwoPlane<Dim>& initial,
                                    const CascadeOptions& opt = {}) {
    if (!(opt.rbar > 0.0 && opt.rbar <= 0.5)) throw PreconditionError("rbar must lie in (0, 1/2]");
    if (!(opt.alpha > 0.0 && opt.alpha <= 1.0)) throw PreconditionError("alpha must lie in (0, 1]");
    const auto& g = u.grid();
    FlatnessTrace<Dim> tr;
    tr.rbar = opt.rbar;
    tr.alpha = opt.alpha;
    double r0 = 1.0;
    for (int d = 0; d < Dim; ++d) r0 = std::min(r0, g.radius() - std::abs(z[d]));
    if (r0 < 1.0) tr.notes.push_back("base scale reduced to " + format_real(r0, 6) + " to stay inside the grid");
    const double ap = initial.aplus_z, am = initial.aminus_z, beta = initial.beta;
    const auto w_full = broken_harmonic(u, ap, am);
    const Grid<Dim> ug = unit_grid<Dim>(opt.unit_cells);

    const auto deficit_at = [&](double s, const Point<Dim>& nu_raw) {
        double acc = 0.0;
        for (const auto& q : ball_node_weights(g, z, s)) {
            const double e = u[q.index] - two_plane_value<Dim>(beta, nu_raw, ap, am, z, g.point(q.index));
            acc += q.weight * e * e;
        }
        return std::sqrt(acc) / std::pow(s, 0.5 * Dim);
    };

    Point<Dim> nu_raw = initial.nu;
    for (int k = 0; k <= opt.steps; ++k) {
        const double s = r0 * std::pow(opt.rbar, k);
        if (s < opt.floor_cells * g.h() * (1.0 - 1e-12)) {
            tr.notes.push_back("cascade truncated at k = " + std::to_string(k) + ": scale below " +
                               format_real(opt.floor_cells, 3) + "h");
            break;
        }
        FlatnessEntry<Dim> e;
        e.k = k;
        e.scale = s;
        e.nu_raw = nu_raw;
        e.nu = (1.0 / norm<Dim>(nu_raw)) * nu_raw;
        e.beta = beta * norm<Dim>(nu_raw);
        e.deficit = deficit_at(s, nu_raw);
        if (k == 0) {
            tr.eps = e.deficit;
            if (tr.eps == 0.0) tr.notes.push_back("initial profile is exact; the cascade is stationary");
            if (tr.eps <= opt.flat_floor * beta) {
                tr.flat = true;
                tr.notes.push_back("initial deficit " + format_real(tr.eps, 6) +
                                   " is at the flatness floor; decay is not measurable at this resolution");
            }
        }
        e.bound = tr.eps * std::pow(opt.rbar, k * (1.0 + 0.5 * opt.alpha));
        // decay is judged with a relative slack of 1e-9 so exact equality at k = 0 passes
        if (e.deficit > e.bound * (1.0 + 1e-9) + 1e-14) tr.decay_ok = false;

        if (tr.eps > 0.0) {
            const double amp = tr.eps * std::pow(opt.rbar, k * opt.alpha);
            ScalarField<Dim> wk(ug);
            ug.for_each_node([&](const Index<Dim>& kk, std::size_t i) {
                const auto x = ug.point(kk);
                wk[i] = (interpolate(w_full, z + s * x) / s - beta * dot<Dim>(x, nu_raw)) / amp;
            });
            const auto hr = harmonic_replacement(wk);
            e.gradient = norm<Dim>(hr.gradient_at_origin);
            nu_raw = nu_raw + (amp / beta) * hr.gradient_at_origin;
        }
        tr.entries.push_back(e);
    }
    for (const auto& e : tr.entries) tr.c0 = std::max(tr.c0, e.gradient);
    for (std::size_t k = 0; k + 1 < tr.entries.size(); ++k) {
        const double d = norm<Dim>(tr.entries[k + 1].nu - tr.entries[k].nu);
        const double b = tr.c0 / beta * tr.eps * std::pow(opt.rbar, k * opt.alpha);
        tr.drift.push_back(d);
        tr.drift_bound.push_back(b);
        if (d > b * (1.0 + 1e-9) + 1e-14) tr.drift_ok = false;
    }
    if (tr.entries.size() < 2) tr.notes.push_back("fewer than two resolvable scales");
    return tr;
}

struct EnvelopeResult {
    Verdict verdict = Verdict::pass;
    std::vector<std::size_t> violations;  // vertex indices
    double max_excess = 0.0;              // max of |x.e| - bound over vertices
    std::size_t checked = 0;

    AuditReport audit() const {
        AuditReport a;
        a.name = "blowup-envelope";
        a.add("checked", static_cast<double>(checked))
            .add("violations", static_cast<double>(violations.size()))
            .add("max_excess", max_excess);
        a.verdict = verdict;
        return a;
    }
};

/// Every curve vertex x in B_1(z) satisfies
///   |(x - z).e| <= coefficient |x - z|^(1 + alpha) + 2h,
/// where coefficient = Cenv eps / beta.
template <int Dim>
EnvelopeResult graph_envelope_check(const LevelSetCurve<Dim>& curve, const Point<Dim>& z, const Point<Dim>& e,
                                    double coefficient, double alpha, double h) {
    if (std::abs(norm<Dim>(e) - 1.0) > 1e-9) throw PreconditionError("envelope direction must be a unit vector");
    EnvelopeResult out;
    out.max_excess = -INFINITY;
    for (std::size_t i = 0; i < curve.vertices.size(); ++i) {
        const auto x = curve.vertices[i] - z;
        const double r = norm<Dim>(x);
        if (r > 1.0) continue;
        ++out.checked;
        const double excess = std::abs(dot<Dim>(x, e)) - coefficient * std::pow(r, 1.0 + alpha);
        out.max_excess = std::max(out.max_excess, excess);
        if (excess > 2.0 * h) out.violations.push_back(i);
    }
    if (out.checked == 0) {
        out.verdict = Verdict::na;
        out.max_excess = 0.0;
    } else if (!out.violations.empty()) {
        out.verdict = Verdict::fail;
    }
    return out;
}

} // namespace jumpfb
