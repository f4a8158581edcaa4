#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../report/audit.hpp"
#include "../solver/picard.hpp"
#include "../util/lcg.hpp"
#include "bump.hpp"
#include "level_set.hpp"

namespace jumpfb {

namespace detail {

template <int Dim>
double edge_gradient_norm(const ScalarField<Dim>& phi) {
    const auto& g = phi.grid();
    double s = 0.0;
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        for (int d = 0; d < Dim; ++d) {
            if (k[d] == g.cells()) continue;
            const double v = phi[i + g.stride(d)] - phi[i];
            s += v * v;
        }
    });
    return std::sqrt(s * std::pow(g.h(), Dim - 2));
}

template <int Dim>
std::vector<double> apply_phase(const StencilOperator<Dim>& op, const ScalarField<Dim>& v) {
    std::vector<double> x(v.values().begin(), v.values().end()), y;
    op.apply(x, y);
    return y;
}

template <int Dim>
double pair(const ScalarField<Dim>& phi, const std::vector<double>& av) {
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += phi[i] * av[i];
    return s;
}

} // namespace detail

/// Discrete -sum a_+ grad u+ . grad phi, the pairing of mu with phi. Uses
/// the solver's edge form, so it is exact on the discrete level.
template <int Dim>
double mu_pair(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p, const BumpTest<Dim>& phi) {
    const auto& g = u.grid();
    const CoefficientSamples<Dim> c(p, g);
    const auto f = phi.sample_on(g);
    return -detail::pair(f, detail::apply_phase(assemble_phase_operator(g, c, true), positive_part(u)));
}

/// Bumps centred on (jittered) points of the zero level set. Centres whose
/// ball would leave the box are skipped.
template <int Dim>
std::vector<BumpTest<Dim>> bump_family(const ScalarField<Dim>& u, int count, double radius, std::uint64_t seed) {
    const auto& g = u.grid();
    const auto curve = extract_level_set(u, 0.0);
    Lcg64 rng(seed);
    std::vector<Point<Dim>> candidates;
    for (std::size_t e = 0; e < curve.elements.size(); ++e) {
        const auto c = curve.element_centroid(e);
        bool fits = true;
        for (int d = 0; d < Dim; ++d) fits = fits && std::abs(c[d]) + 1.2 * radius + 0.1 * radius <= g.radius() - g.h();
        if (fits) candidates.push_back(c);
    }
    std::vector<BumpTest<Dim>> out;
    if (candidates.empty() || count <= 0) return out;
    for (int k = 0; k < count; ++k) {
        const std::size_t idx = static_cast<std::size_t>((k + 0.5) * candidates.size() / count);
        Point<Dim> c = candidates[std::min(idx, candidates.size() - 1)];
        for (int d = 0; d < Dim; ++d) c[d] += rng.uniform(-0.1, 0.1) * radius;
        out.emplace_back(c, radius * rng.uniform(0.8, 1.2));
    }
    return out;
}

struct MuAuditResult {
    std::vector<double> mu;        // mu_pair per bump
    std::vector<double> margin;    // mu_pair / |grad phi|
    std::vector<double> defect;    // symmetry defect / |grad phi|
    double tolerance = 0.0;
    Verdict verdict = Verdict::na;
    std::vector<std::string> notes;

    AuditReport audit() const {
        AuditReport a;
        a.name = "fb-mu";
        a.add_series("mu", mu).add_series("margin", margin).add_series("defect", defect);
        a.tolerance = tolerance;
        a.verdict = verdict;
        a.notes = notes;
        return a;
    }
};

/// Positivity of mu and the two-sided identity sum a_+ grad u+ grad phi =
/// sum a_- grad u- grad phi over a bump family, both normalised by
/// |grad phi|_{L2}. tol = constant * h^(1/2).
template <int Dim>
MuAuditResult mu_audit(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p,
                       const std::vector<BumpTest<Dim>>& bumps, double constant = 0.05) {
    const auto& g = u.grid();
    const CoefficientSamples<Dim> c(p, g);
    const auto yp = detail::apply_phase(assemble_phase_operator(g, c, true), positive_part(u));
    const auto ym = detail::apply_phase(assemble_phase_operator(g, c, false), negative_part(u));
    MuAuditResult out;
    out.tolerance = constant * std::sqrt(g.h());
    if (bumps.size() < 10) out.notes.push_back("fewer than 10 bumps in the family");
    bool ok = true;
    for (const auto& b : bumps) {
        const auto phi = b.sample_on(g);
        const double nrm = detail::edge_gradient_norm(phi);
        const double plus = detail::pair(phi, yp), minus = detail::pair(phi, ym);
        out.mu.push_back(-plus);
        out.margin.push_back(-plus / nrm);
        out.defect.push_back(std::abs(plus - minus) / nrm);
        ok = ok && out.margin.back() >= -out.tolerance && out.defect.back() <= out.tolerance;
    }
    out.verdict = ok ? Verdict::pass : Verdict::fail;
    return out;
}

} // namespace jumpfb
