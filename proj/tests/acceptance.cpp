// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <jumpfb/acf/cap.hpp>
#include <jumpfb/acf/monotonicity.hpp>
#include <jumpfb/blowup/cascade.hpp>
#include <jumpfb/cli/experiment.hpp>
#include <jumpfb/freeboundary/classify.hpp>
#include <jumpfb/freeboundary/flux.hpp>
#include <jumpfb/freeboundary/lipschitz.hpp>
#include <jumpfb/freeboundary/measure.hpp>
#include <jumpfb/matrixext/matrix_audit.hpp>

using namespace jumpfb;
namespace fs = std::filesystem;

namespace {

constexpr double lam = 0.4;
const std::vector<double> kAcfRadii{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double v) { return format_real(v, 4); }

// least-squares slope of log(y) against log(h)
double observed_order(const std::vector<double>& h, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]) / h.size();
        my += std::log(y[i]) / h.size();
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sxy += (std::log(h[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
    }
    return sxy / sxx;
}

TwoPhaseProblem<2> problem(const std::string& name) {
    if (name == "twoplane") {
        const auto a = parse_coefficient("constant(2)", lam), b = parse_coefficient("constant(1)", lam);
        return {a, b, parse_boundary<2>("twoplane(1, [1, 0])", 2.0, 1.0), lam};
    }
    if (name == "hoelder") {
        const auto a = parse_coefficient("hoelder(2, 0.25, [0, 0], 0.5)", lam);
        const auto b = parse_coefficient("hoelder(1, 0.25, [0, 0], 0.5)", lam);
        return {a, b, parse_boundary<2>("twoplane(1, [1, 0])", 2.0, 1.0), lam};
    }
    if (name == "matrix") {
        const auto a = parse_coefficient("constant(2)", lam), b = parse_coefficient("constant(1)", lam);
        return matrix_problem<2>(a, b, parse_matrix_model("diag(2, 1)", lam),
                                 parse_boundary<2>("twoplane(1, [1, 0])", 2.0, 1.0));
    }
    if (name == "identity") {
        const auto a = parse_coefficient("constant(2)", lam), b = parse_coefficient("constant(1)", lam);
        return matrix_problem<2>(a, b, MatrixModel::identity(2, lam),
                                 parse_boundary<2>("twoplane(1, [1, 0])", 2.0, 1.0));
    }
    throw std::logic_error("unknown case " + name);
}

// solutions on the unit box, shared between criteria
const Solution<2>& solved(const std::string& name, int cells) {
    static std::map<std::pair<std::string, int>, Solution<2>> cache;
    const auto key = std::make_pair(name, cells);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const auto g = build_grid<2>(1.0, cells);
    return cache.emplace(key, continuation_solve(problem(name), g, default_eps_schedule(g.h()))).first->second;
}

double exact_two_plane(const Point<2>& x) { return x[0] > 0.0 ? 0.5 * x[0] : x[0]; }

Point<2> snapped_center(const ScalarField<2>& u) {
    const auto c = extract_level_set(u, 0.0);
    Point<2> best = c.vertices.at(0);
    for (const auto& v : c.vertices)
        if (norm<2>(v) < norm<2>(best)) best = v;
    return best;
}

void criterion1(Outcome& o) {
    std::vector<double> hs, near, far;
    for (int cells : {128, 256, 512}) {
        const auto& s = solved("twoplane", cells);
        const auto& g = s.u.grid();
        double en = 0.0, ef = 0.0;
        g.for_each_node([&](const Index<2>& k, std::size_t i) {
            const auto x = g.point(k);
            const double e = std::abs(s.u[i] - exact_two_plane(x));
            double& slot = std::abs(x[0]) >= 0.25 ? ef : en;
            slot = std::max(slot, e);
        });
        const double h = g.h();
        hs.push_back(h);
        near.push_back(en);
        far.push_back(ef);
        o.detail << " h=1/" << cells / 2 << ": near " << fmt(en) << " far " << fmt(ef) << ";";
        o.require(en <= 0.5 * std::pow(h, 0.9), "near error <= 0.5 h^0.9 at h=1/" + std::to_string(cells / 2));
        o.require(ef <= 5.0 * std::pow(h, 1.8), "far error <= 5 h^1.8 at h=1/" + std::to_string(cells / 2));
    }
    const double pn = observed_order(hs, near), pf = observed_order(hs, far);
    o.detail << " orders near " << fmt(pn) << " far " << fmt(pf);
    o.require(pn >= 0.9 - 0.2, "near order >= 0.7");
    o.require(pf >= 1.8 - 0.2, "far order >= 1.6");
}

void criterion2(Outcome& o) {
    const auto g = build_grid<2>(1.0, 256);
    const auto u = sample<2>(g, exact_two_plane);
    const auto up = positive_part(u), um = negative_part(u);
    const double target = std::numbers::pi * std::numbers::pi / 16.0;
    double lo = INFINITY, hi = 0.0, worst = 0.0;
    for (double r : kAcfRadii) {
        const double phi = acf_phi(up, um, Point<2>{}, r);
        lo = std::min(lo, phi);
        hi = std::max(hi, phi);
        worst = std::max(worst, std::abs(phi - target) / target);
    }
    const double spread = (hi - lo) / hi;
    o.detail << " spread " << fmt(spread) << ", max deviation from pi^2/16 " << fmt(worst);
    o.require(spread <= 0.04, "spread <= 4%");
    o.require(worst <= 0.04, "within 4% of pi^2/16");
}

void criterion3(Outcome& o) {
    const auto p = problem("hoelder");
    std::vector<double> cbar;
    for (int cells : {128, 256, 512}) {
        const auto& u = solved("hoelder", cells).u;
        const auto r = monotonicity_audit(u, p.modulus, snapped_center(u), kAcfRadii);
        cbar.push_back(r.minimal_cbar);
        o.detail << " h=1/" << cells / 2 << ": " << to_string(r.verdict) << " minimal cbar " << fmt(r.minimal_cbar)
                 << ";";
        if (cells == 256) o.require(r.verdict == Verdict::pass, "monotonicity verdict PASS at h=1/128");
    }
    // judged on the finest refinement step; h = 1/64 is listed but pre-asymptotic
    o.require(std::isfinite(cbar[2]) && cbar[2] <= 1.1 * cbar[1] + 1e-9, "minimal cbar decreases or stabilizes");
}

void criterion4(Outcome& o, const fs::path& configs) {
    for (const char* name : {"twoplane-2d", "hoelder-2d", "matrix-2d", "rotated-2d", "saddle-2d"}) {
        auto cfg = make_config(load_config_file((configs / (std::string(name) + ".cfg")).string()));
        cfg.audits = {"acf-friedland-hayman"};
        const auto r = run_experiment(cfg);
        const auto& a = r.audits.at(0);
        o.detail << ' ' << name << ' ' << to_string(a.verdict) << ';';
        o.require(a.verdict == Verdict::pass, std::string(name) + " beta sum >= 2 - 8h/r");
    }
    const auto& u = solved("twoplane", 256).u;
    const auto fh = friedland_hayman_check(u, Point<2>{}, kAcfRadii);
    double worst = 0.0;
    bool equal = true;
    for (std::size_t i = 0; i < fh.sum.size(); ++i) {
        worst = std::max(worst, std::abs(fh.sum[i] - 2.0));
        equal = equal && std::abs(fh.sum[i] - 2.0) <= fh.tolerance[i];
    }
    o.detail << " two-plane max |sum - 2| " << fmt(worst);
    o.require(!fh.sum.empty() && equal, "two-plane sum equals 2 within tolerance");
}

void criterion5(Outcome& o) {
    const auto p = problem("hoelder");
    const auto& u = solved("hoelder", 256).u;
    const auto bumps = bump_family(u, 16, 0.15, 1);
    const auto r = mu_audit(u, p, bumps);
    double margin = INFINITY, defect = 0.0;
    for (double m : r.margin) margin = std::min(margin, m);
    for (double d : r.defect) defect = std::max(defect, d);
    o.detail << " bumps " << bumps.size() << ", min margin " << fmt(margin) << ", max defect " << fmt(defect);
    o.require(bumps.size() == 16, "16 bumps");
    o.require(margin >= -5e-3, "margins >= -5e-3");
    o.require(defect <= 5e-3, "defects <= 5e-3");
}

void criterion6(Outcome& o) {
    const BumpTest<2> eta(Point<2>{}, 0.5);
    for (const auto& [name, tol] : {std::pair<std::string, double>{"twoplane", 0.02}, {"hoelder", 0.05}}) {
        const auto p = problem(name);
        std::vector<double> hs, mm;
        for (int cells : {128, 256, 512}) {
            const auto& u = solved(name, cells).u;
            hs.push_back(u.grid().h());
            mm.push_back(flux_balance(u, p, eta).mismatch);
        }
        const double order = observed_order(hs, mm);
        o.detail << ' ' << name << " mismatch " << fmt(mm[0]) << ", " << fmt(mm[1]) << ", " << fmt(mm[2]) << " order "
                 << fmt(order) << ';';
        o.require(mm[1] <= tol, name + " mismatch within tolerance at h=1/128");
        o.require(mm[1] < mm[0] && mm[2] < mm[1], name + " mismatch decreases");
        o.require(order >= 0.8, name + " order >= 0.8");
    }
}

void criterion7(Outcome& o) {
    const auto g = build_grid<2>(1.0, 512);
    const Point<2> nu{std::cos(0.05), std::sin(0.05)};
    const auto u = TwoPlane<2>(1.0, nu, Point<2>{}, 2.0, 1.0).sample_on(g);
    CascadeOptions opt;
    opt.rbar = 0.5;
    opt.alpha = 0.5;
    const auto tr = flatness_cascade(u, Point<2>{}, TwoPlane<2>(1.0, unit_axis<2>(0), Point<2>{}, 2.0, 1.0), opt);
    const double d0 = tr.entries.at(0).deficit;
    int checked = 0;
    for (const auto& e : tr.entries) {
        if (e.scale < 16.0 * g.h()) continue;
        ++checked;
        const double bound = d0 * std::pow(opt.rbar, e.k * (1.0 + opt.alpha / 2.0));
        o.require(e.deficit <= bound * (1.0 + 1e-9), "deficit bound at k=" + std::to_string(e.k));
    }
    for (std::size_t k = 0; k < tr.drift.size(); ++k)
        o.require(tr.drift[k] <= tr.drift_bound[k] * (1.0 + 1e-9), "drift envelope at k=" + std::to_string(k));
    o.detail << " steps checked " << checked << ", deficit " << fmt(d0) << " -> " << fmt(tr.entries.back().deficit)
             << ", c0 " << fmt(tr.c0) << ", verdict " << to_string(tr.verdict());
    o.require(checked >= 3, "at least three resolvable steps");
    o.require(tr.verdict() == Verdict::pass, "cascade verdict PASS");
}

void criterion8(Outcome& o) {
    const auto g = build_grid<2>(2.5, 640);
    const auto plane = sample<2>(g, exact_two_plane);
    const auto saddle = sample<2>(g, [](const Point<2>& x) { return x[0] * x[1]; });
    const auto min_phi = [&](const ScalarField<2>& u) {
        const auto up = positive_part(u), um = negative_part(u);
        double m = INFINITY;
        for (double r : kAcfRadii) m = std::min(m, acf_phi(up, um, Point<2>{}, r));
        return m;
    };
    const double a = min_phi(plane), b = min_phi(saddle);
    const auto radii = dyadic_radii(2.0, g.h());
    const auto ca = classify_point(plane, Point<2>{}, radii), cb = classify_point(saddle, Point<2>{}, radii);
    o.detail << " min phi " << fmt(a) << " vs " << fmt(b) << ", factor " << fmt(a / b);
    o.require(a >= 100.0 * b, "factor >= 100");
    o.require(ca.label == PointClass::nondegenerate, "two-plane point nondegenerate");
    o.require(cb.label == PointClass::degenerate, "saddle point degenerate");
}

void criterion9(Outcome& o) {
    for (const char* name : {"twoplane", "hoelder", "matrix"}) {
        std::vector<double> hs, ratios;
        for (int cells : {128, 256, 512}) {
            const auto& u = solved(name, cells).u;
            hs.push_back(u.grid().h());
            ratios.push_back(lipschitz_audit(u, 0.5).ratio);
        }
        const auto a = lipschitz_report(hs, ratios, 0.1);
        o.detail << ' ' << name << ' ' << fmt(ratios[0]) << ".." << fmt(ratios[2]) << ';';
        o.require(a.verdict == Verdict::pass, std::string(name) + " ratio spread <= 10%");
    }
    // 3-d: h = 1/16, 1/32
    const auto a3 = parse_coefficient("constant(2)", lam), b3 = parse_coefficient("constant(1)", lam);
    const TwoPhaseProblem<3> p3(a3, b3, parse_boundary<3>("twoplane(1, [1, 0, 0])", 2.0, 1.0), lam);
    std::vector<double> hs, ratios;
    for (int cells : {32, 64}) {
        const auto g = build_grid<3>(1.0, cells);
        const auto s = continuation_solve(p3, g, default_eps_schedule(g.h()));
        hs.push_back(g.h());
        ratios.push_back(lipschitz_audit(s.u, 0.5).ratio);
    }
    o.detail << " twoplane-3d " << fmt(ratios[0]) << ".." << fmt(ratios[1]);
    o.require(lipschitz_report(hs, ratios, 0.1).verdict == Verdict::pass, "twoplane-3d ratio spread <= 10%");
}

void criterion10(Outcome& o) {
    const auto scalar = problem("twoplane");
    const auto ident = problem("identity");
    const auto& a = solved("twoplane", 128);
    const auto& b = solved("identity", 128);
    const std::vector<double> radii{0.15, 0.2, 0.3, 0.4, 0.5};
    const auto ra = monotonicity_audit(a.u, scalar.modulus, Point<2>{}, radii);
    const auto rb = acf_matrix_audit(b.u, ident, Point<2>{}, radii);
    const bool bit = max_abs_difference(a.u, b.u) == 0.0 && a.residual == b.residual && rb.acf &&
                     ra.report.phi == rb.acf->report.phi && ra.verdict == rb.verdict;
    o.require(bit, "identity path bit-matches the scalar path");

    const auto diag = problem("matrix");
    const auto rd = acf_matrix_audit(solved("matrix", 256).u, diag, Point<2>{}, kAcfRadii);
    o.detail << " diag(2,1) " << to_string(rd.verdict) << " kappa " << fmt(rd.kappa) << ';';
    o.require(rd.verdict == Verdict::pass, "diag(2,1) audit PASS");

    const auto g = build_grid<2>(1.0, 32);
    const Matrix<2> mp{{{2, 0}, {0, 1}}}, mm{{{1, 0}, {0, 2}}};
    const auto rn = acf_matrix_audit<2>(sample<2>(g, exact_two_plane), mp, mm, identity_matrix<2>(),
                                        ModulusOfContinuity{}, Point<2>{}, {0.25, 0.5});
    const bool noted = !rn.notes.empty() && rn.notes[0].find("ProportionalityFailure") != std::string::npos;
    o.detail << " non-proportional " << to_string(rn.verdict);
    o.require(rn.verdict == Verdict::na && noted, "non-proportional gives NA with ProportionalityFailure");
}

} // namespace

int main(int argc, char** argv) {
    const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path("configs");
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"two-plane reproduction", criterion1},
        {"ACF constancy on two-plane fields", criterion2},
        {"ACF monotonicity on the Hoelder case", criterion3},
        {"Friedland-Hayman on shipped 2-d cases", [&](Outcome& o) { criterion4(o, configs); }},
        {"measure positivity and symmetry", criterion5},
        {"flux balance", criterion6},
        {"flatness cascade", criterion7},
        {"degeneracy dichotomy", criterion8},
        {"Lipschitz ratio under refinement", criterion9},
        {"matrix reduction and audit", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %zu: %s:%s (%.1fs)\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
        failed += !o.ok;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
