#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../acf/cap.hpp"
#include "../acf/monotonicity.hpp"
#include "../blowup/cascade.hpp"
#include "../blowup/two_plane.hpp"
#include "../freeboundary/classify.hpp"
#include "../freeboundary/flux.hpp"
#include "../freeboundary/level_set.hpp"
#include "../freeboundary/lipschitz.hpp"
#include "../freeboundary/measure.hpp"
#include "../matrixext/matrix_audit.hpp"
#include "../report/emit.hpp"
#include "../solver/picard.hpp"
#include "config.hpp"

namespace jumpfb {

template <int Dim>
TwoPhaseProblem<Dim> build_problem(const ExperimentConfig& c) {
    const auto ap = parse_coefficient(c.aplus, c.lambda), am = parse_coefficient(c.aminus, c.lambda);
    const Point<Dim> origin{};
    auto g = parse_boundary<Dim>(c.boundary, ap(origin), am(origin));
    if (c.matrix.empty()) return TwoPhaseProblem<Dim>(ap, am, std::move(g), c.lambda);
    return matrix_problem<Dim>(ap, am, parse_matrix_model(c.matrix, c.lambda), std::move(g));
}

inline std::vector<double> eps_schedule_for(const ExperimentConfig& c, double h) {
    if (c.eps_schedule == "default") return default_eps_schedule(h, c.solver.face);
    return detail::parse_numbers(c.eps_schedule, "solver.eps_schedule");
}

template <int Dim>
struct ExperimentField {
    ScalarField<Dim> u;
    std::optional<Solution<Dim>> solution;
};

/// Solved field, or the boundary data sampled everywhere for problem.field = exact.
template <int Dim>
ExperimentField<Dim> make_field(const ExperimentConfig& c, const TwoPhaseProblem<Dim>& p, const Grid<Dim>& g) {
    if (c.field == "exact") return {sample<Dim>(g, [&](const Point<Dim>& x) { return p.boundary(x); }), std::nullopt};
    auto s = continuation_solve(p, g, eps_schedule_for(c, g.h()), c.solver);
    ScalarField<Dim> u = s.u;
    return {std::move(u), std::move(s)};
}

namespace detail {

template <int Dim>
double reference_error(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p) {
    const auto& g = u.grid();
    double e = 0.0;
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        const auto x = g.point(k);
        if (norm<Dim>(x) <= g.radius()) e = std::max(e, std::abs(u[i] - p.boundary(x)));
    });
    return e;
}

inline std::vector<double> default_acf_radii(double radius, double h) {
    std::vector<double> out;
    for (int k = 2; k <= 10; ++k) {
        const double r = 0.05 * k * radius;
        if (r >= 4.0 * h) out.push_back(r);
    }
    return out;
}

} // namespace detail

/// Runs one experiment: optional refinement sweep, solve, then the audits
/// in declared order. Reports (and dumps, unless output.dump = false) are
/// written when output.dir is set.
template <int Dim>
RunReport run_experiment_dim(const ExperimentConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto seconds = [](clock::time_point t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };
    RunReport rep;
    rep.name = cfg.name;
    rep.config = cfg.entries;
    rep.config.erase("output.dir");
    const bool dump = !cfg.out_dir.empty() && cfg.flag("output.dump", true);
    const std::filesystem::path out(cfg.out_dir.empty() ? "." : cfg.out_dir);

    const auto p = build_problem<Dim>(cfg);
    Point<Dim> z;
    for (int d = 0; d < Dim; ++d) z[d] = cfg.center[d];

    // sweep coarse to fine; audits use the finest field
    std::vector<int> cells_list;
    if (cfg.sweep.empty()) {
        cells_list.push_back(cfg.cells);
    } else {
        for (double h : cfg.sweep) cells_list.push_back(static_cast<int>(std::lround(2.0 * cfg.radius / h)));
        std::sort(cells_list.begin(), cells_list.end());
        rep.refinement_columns = {"h", "cells", "residual", "picard_iters", "error_max", "lipschitz_ratio"};
    }
    const double rho = cfg.number("fb.lipschitz_rho", 0.5 * cfg.radius);

    std::optional<ExperimentField<Dim>> field;
    std::vector<double> sweep_h, sweep_ratio;
    const auto t_solve = clock::now();
    try {
        for (int n : cells_list) {
            const auto g = build_grid<Dim>(cfg.radius, n);
            field = make_field<Dim>(cfg, p, g);
            if (!cfg.sweep.empty()) {
                const auto& f = *field;
                const double nan = std::numeric_limits<double>::quiet_NaN();
                double iters = 0.0;
                if (f.solution)
                    for (int i : f.solution->picard_iters) iters += i;
                const double ratio = lipschitz_audit(f.u, rho).ratio;
                rep.refinement_rows.push_back({g.h(), double(n), f.solution ? f.solution->residual : nan, iters,
                                               cfg.reference ? detail::reference_error(f.u, p) : nan, ratio});
                sweep_h.push_back(g.h());
                sweep_ratio.push_back(ratio);
            }
        }
    } catch (const Error& e) {
        rep.status = std::string("aborted: ") + e.what();
        for (const auto& name : cfg.audits) {
            AuditReport a;
            a.name = name;
            a.verdict = Verdict::fail;
            a.notes.push_back(std::string("not run, solver failure: ") + e.what());
            rep.audits.push_back(std::move(a));
        }
        if (!cfg.out_dir.empty()) emit_report(rep, out);
        return rep;
    }
    rep.timing["solve"] = seconds(t_solve);
    const auto& u = field->u;
    const auto& g = u.grid();
    std::string snap_note;
    if (cfg.flag("audit.snap", false)) {
        const auto curve = extract_level_set(u, 0.0);
        if (curve.vertices.empty()) throw ConfigError("audit.snap: the zero level set is empty");
        Point<Dim> best = curve.vertices.front();
        for (const auto& v : curve.vertices)
            if (norm<Dim>(v - z) < norm<Dim>(best - z)) best = v;
        z = best;
        snap_note = "centre snapped to the free-boundary vertex (";
        for (int d = 0; d < Dim; ++d) snap_note += (d ? ", " : "") + format_real(z[d], 6);
        snap_note += ")";
    }
    if (dump) save_grid_dump((out / "solution.grid").string(), u);

    const auto acf_radii = cfg.numbers("acf.radii", detail::default_acf_radii(cfg.radius, g.h()));
    MonotonicityOptions mopt;
    mopt.cbar = cfg.number("acf.cbar", mopt.cbar);
    mopt.tol_factor = cfg.number("acf.tol_factor", mopt.tol_factor);
    mopt.caps = cfg.flag("acf.caps", mopt.caps);

    // two-plane fit of the unnormalised blowup at the largest scale about z
    const auto base_fit = [&] {
        double r0 = 1.0;
        for (int d = 0; d < Dim; ++d) r0 = std::min(r0, g.radius() - std::abs(z[d]));
        const int unit_cells = static_cast<int>(cfg.number("blowup.unit_cells", 64));
        const auto v = rescale_linear(u, z, r0, unit_grid<Dim>(unit_cells));
        return fit_two_plane(v, p.aplus(z), p.aminus(z));
    };
    // blowup.initial = twoplane(beta, [nu]), else the fitted profile
    const auto initial_plane = [&] {
        if (!cfg.has("blowup.initial")) return base_fit().plane;
        const auto call = parse_model_call(cfg.text("blowup.initial", ""));
        if (call.name != "twoplane" || call.args.size() != 2)
            throw ConfigError("blowup.initial must be twoplane(beta, [nu])");
        const auto v = call.args[1].vector();
        if (v.size() != static_cast<std::size_t>(Dim)) throw ConfigError("blowup.initial: nu has the wrong dimension");
        Point<Dim> nu;
        for (int d = 0; d < Dim; ++d) nu[d] = v[d];
        return TwoPlane<Dim>(call.args[0].number(), (1.0 / norm<Dim>(nu)) * nu, Point<Dim>{}, p.aplus(z), p.aminus(z));
    };
    const auto matrix_pair = [&] {
        auto [ap, am] = conductivity_at(p, z);
        if (cfg.has("matrix.minus")) {
            const auto pm = parse_matrix_model(cfg.text("matrix.minus", ""), cfg.lambda)(z);
            for (int i = 0; i < Dim; ++i)
                for (int j = 0; j < Dim; ++j) am[i][j] = p.aminus(z) * pm[i][j];
        }
        return std::pair{ap, am};
    };

    const std::map<std::string, std::function<AuditReport()>> audits{
        {"solve-residual",
         [&] {
             AuditReport a;
             a.name = "solve-residual";
             a.tolerance = cfg.residual_tol;
             if (!field->solution) {
                 a.verdict = Verdict::na;
                 a.notes.push_back("field sampled from exact data; nothing was solved");
                 if (cfg.reference) a.add("reference_error", detail::reference_error(u, p));
                 return a;
             }
             const auto& s = *field->solution;
             std::vector<double> iters(s.picard_iters.begin(), s.picard_iters.end());
             a.add("residual", s.residual).add("epsilon_final", s.epsilon_final).add_series("picard_iters", iters);
             a.add("max_principle", s.max_principle).add("picard_monotone", s.picard_monotone);
             if (cfg.reference) a.add("reference_error", detail::reference_error(u, p));
             a.notes = s.diagnostics;
             a.verdict = s.residual <= cfg.residual_tol && s.max_principle ? Verdict::pass : Verdict::fail;
             return a;
         }},
        {"acf-monotonicity",
         [&] {
             const auto r = monotonicity_audit(u, p.modulus, z, acf_radii, mopt);
             if (dump) {
                 std::ostringstream os;
                 r.report.write_csv(os);
                 write_text_file(out / "radial.csv", os.str());
             }
             return r.audit();
         }},
        {"acf-friedland-hayman",
         [&] {
             if constexpr (Dim == 2) {
                 return friedland_hayman_check(u, z, cfg.numbers("fh.radii", acf_radii)).audit();
             } else {
                 AuditReport a;
                 a.name = "acf-friedland-hayman";
                 a.notes.push_back("cap characteristics are evaluated in 2-d only");
                 return a;
             }
         }},
        {"fb-mu",
         [&] {
             const int count = static_cast<int>(cfg.number("fb.bumps", 16));
             const auto bumps = bump_family(u, count, cfg.number("fb.bump_radius", 0.15 * cfg.radius), cfg.seed);
             if (bumps.empty()) {
                 AuditReport a;
                 a.name = "fb-mu";
                 a.notes.push_back("no free-boundary element admits a bump inside the grid");
                 return a;
             }
             return mu_audit(u, p, bumps, cfg.number("fb.mu_constant", 0.05)).audit();
         }},
        {"fb-flux",
         [&] {
             Point<Dim> c = z;
             const auto ec = cfg.numbers("fb.eta_center", cfg.center);
             for (int d = 0; d < Dim && d < static_cast<int>(ec.size()); ++d) c[d] = ec[d];
             const BumpTest<Dim> eta(c, cfg.number("fb.eta_radius", 0.5 * cfg.radius));
             const auto r = flux_balance(u, p, eta, cfg.numbers("fb.flux_levels", {}));
             if (dump) {
                 std::ostringstream os;
                 extract_level_set(u, 0.0).write_csv(os);
                 write_text_file(out / "levelset.csv", os.str());
             }
             return r.audit(cfg.number("fb.flux_tol", 0.02));
         }},
        {"fb-classify",
         [&] {
             const auto radii = dyadic_radii(cfg.number("fb.classify_rmax", 0.5 * cfg.radius), g.h());
             const auto c = classify_point(u, z, radii, cfg.number("fb.classify_threshold", 0.05));
             auto a = c.audit();
             const std::string expect = cfg.text("fb.expect", "any");
             if (expect != "any") {
                 const bool want = expect == "nondegenerate";
                 a.verdict = (c.label == PointClass::nondegenerate) == want ? Verdict::pass : Verdict::fail;
                 a.notes.push_back("expected " + expect);
             }
             return a;
         }},
        {"fb-lipschitz",
         [&] {
             const double tol = cfg.number("fb.lipschitz_tol", 0.10);
             if (!sweep_h.empty()) return lipschitz_report(sweep_h, sweep_ratio, tol);
             // without a sweep, compare against the grid with half the cells
             std::vector<double> hs, ratios;
             if (g.cells() % 4 == 0 && g.cells() / 2 >= 16) {
                 const auto coarse = make_field<Dim>(cfg, p, build_grid<Dim>(cfg.radius, g.cells() / 2));
                 hs.push_back(2.0 * g.h());
                 ratios.push_back(lipschitz_audit(coarse.u, rho).ratio);
             }
             hs.push_back(g.h());
             ratios.push_back(lipschitz_audit(u, rho).ratio);
             auto a = lipschitz_report(hs, ratios, tol);
             if (hs.size() < 2) {
                 a.verdict = Verdict::na;
                 a.notes.push_back("no coarser grid available for comparison");
             }
             return a;
         }},
        {"fb-perimeter",
         [&] {
             AuditReport a;
             a.name = "fb-perimeter";
             const auto curve = extract_level_set(u, 0.0);
             const double frac = two_sided_fraction(u, curve);
             a.add("perimeter", perimeter_diagnostic(u))
                 .add("elements", static_cast<double>(curve.elements.size()))
                 .add("two_sided_fraction", frac);
             a.tolerance = cfg.number("fb.two_sided_min", 0.9);
             if (curve.empty()) {
                 a.notes.push_back("zero level set is empty");
                 return a;
             }
             a.verdict = frac >= a.tolerance ? Verdict::pass : Verdict::fail;
             return a;
         }},
        {"blowup-fit",
         [&] {
             const double r = cfg.number("blowup.fit_radius", 0.5 * cfg.radius);
             const int unit_cells = static_cast<int>(cfg.number("blowup.unit_cells", 64));
             const auto v = rescale(u, z, r, unit_grid<Dim>(unit_cells));
             const auto f = fit_two_plane(v, p.aplus(z), p.aminus(z));
             AuditReport a;
             a.name = "blowup-fit";
             std::vector<double> nu(f.plane.nu.begin(), f.plane.nu.end());
             a.add("radius", r).add("beta", f.plane.beta).add_series("nu", nu).add("deficit", f.deficit);
             a.add("gauss_newton_steps", f.diagnostics.gauss_newton_steps);
             a.tolerance = cfg.number("blowup.fit_tol", 0.05);
             a.verdict = f.deficit <= a.tolerance ? Verdict::pass : Verdict::fail;
             if (f.diagnostics.diverged) a.notes.push_back("a Gauss-Newton polish step was rejected");
             return a;
         }},
        {"blowup-cascade",
         [&] {
             CascadeOptions o;
             o.rbar = cfg.number("blowup.rbar", o.rbar);
             o.alpha = cfg.number("blowup.alpha", o.alpha);
             o.steps = static_cast<int>(cfg.number("blowup.steps", o.steps));
             o.unit_cells = static_cast<int>(cfg.number("blowup.unit_cells", o.unit_cells));
             o.floor_cells = cfg.number("blowup.floor_cells", o.floor_cells);
             o.flat_floor = cfg.number("blowup.flat_floor", o.flat_floor);
             const auto tr = flatness_cascade(u, z, initial_plane(), o);
             if (dump) {
                 std::ostringstream os;
                 tr.write_csv(os);
                 write_text_file(out / "flatness.csv", os.str());
             }
             return tr.audit();
         }},
        {"blowup-envelope",
         [&] {
             const auto f = base_fit();
             const double coefficient = cfg.number("blowup.envelope_c", 4.0) * f.deficit / f.plane.beta;
             const auto r = graph_envelope_check(extract_level_set(u, 0.0), z, f.plane.nu, coefficient,
                                                 cfg.number("blowup.alpha", 0.5), g.h());
             auto a = r.audit();
             a.add("coefficient", coefficient);
             return a;
         }},
        {"matrix-kappa",
         [&] {
             AuditReport a;
             a.name = "matrix-kappa";
             const auto [ap, am] = matrix_pair();
             const double expected = p.aplus(z) / p.aminus(z);
             a.add("expected", expected);
             a.tolerance = 1e-12 * expected;
             try {
                 const double k = kappa_check<Dim>(ap, am);
                 a.add("kappa", k).add("difference", std::abs(k - expected));
                 a.verdict = std::abs(k - expected) <= a.tolerance ? Verdict::pass : Verdict::fail;
             } catch (const ProportionalityFailure& e) {
                 a.notes.push_back(std::string("ProportionalityFailure: ") + e.what());
             }
             return a;
         }},
        {"matrix-acf",
         [&] {
             const auto [ap, am] = matrix_pair();
             const Matrix<Dim> P = p.matrix ? (*p.matrix)(z) : identity_matrix<Dim>();
             return acf_matrix_audit<Dim>(u, ap, am, P, p.modulus, z, acf_radii, mopt).audit();
         }},
    };

    for (const auto& name : cfg.audits) {
        const auto t0 = clock::now();
        AuditReport a;
        try {
            a = audits.at(name)();
        } catch (const EmptyCap& e) {
            a.verdict = Verdict::na;
            a.notes.push_back(std::string("EmptyCap: ") + e.what());
        } catch (const SupportOverlap& e) {
            a.verdict = Verdict::na;
            a.notes.push_back(std::string("SupportOverlap: ") + e.what());
        } catch (const NotOnBoundary& e) {
            a.verdict = Verdict::na;
            a.notes.push_back(std::string("NotOnBoundary: ") + e.what());
        } catch (const Error& e) {
            a.verdict = Verdict::fail;
            a.notes.push_back(std::string("error: ") + e.what());
        }
        a.name = name;
        if (!snap_note.empty()) a.notes.push_back(snap_note);
        rep.audits.push_back(std::move(a));
        rep.timing["audit." + name] = seconds(t0);
    }

    if (!cfg.out_dir.empty()) {
        std::set<ReportFormat> formats;
        for (const auto& f : detail::split(cfg.text("output.formats", "json,csv,text"), ','))
            if (!f.empty()) formats.insert(parse_report_format(f));
        emit_report(rep, out, formats);
        nlohmann::json t(rep.timing);
        write_text_file(out / "timing.json", t.dump(2) + "\n");
    }
    return rep;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
    return cfg.dim == 2 ? run_experiment_dim<2>(cfg) : run_experiment_dim<3>(cfg);
}

} // namespace jumpfb
