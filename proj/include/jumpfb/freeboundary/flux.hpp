#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../field/calculus.hpp"
#include "../report/audit.hpp"
#include "../solver/problem.hpp"
#include "bump.hpp"
#include "level_set.hpp"

namespace jumpfb {

struct FluxBalanceResult {
    std::vector<double> levels;   // eps values actually used
    std::vector<double> plus;     // integral of a_+ |grad u| eta over {u = eps}
    std::vector<double> minus;    // integral of a_- |grad u| eta over {u = -eps}
    double plus_limit = 0.0;
    double minus_limit = 0.0;
    double mismatch = 0.0;  // relative
    std::vector<std::string> notes;

    AuditReport audit(double tolerance) const {
        AuditReport a;
        a.name = "fb-flux";
        a.add_series("eps", levels)
            .add_series("plus", plus)
            .add_series("minus", minus)
            .add("plus_limit", plus_limit)
            .add("minus_limit", minus_limit)
            .add("mismatch", mismatch);
        a.tolerance = tolerance;
        a.verdict = mismatch <= tolerance ? Verdict::pass : Verdict::fail;
        a.notes = notes;
        a.notes.push_back("discrete level curves always have finite length; the finite-perimeter hypothesis is not "
                          "checked");
        return a;
    }
};

namespace detail {

// Value at 0 of the least-squares polynomial through (x, y), degree
// min(2, n - 1).
inline double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return 0.0;
    const int cols = std::min(3, n);
    Eigen::MatrixXd a(n, cols);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < cols; ++j) a(i, j) = std::pow(x[i], j);
        b(i) = y[i];
    }
    return a.colPivHouseholderQr().solve(b)(0);
}

template <int Dim>
double max_gradient_in(const ScalarField<Dim>& u, const BumpTest<Dim>& eta) {
    const auto grad = gradient_field(u);
    const auto& g = u.grid();
    double m = 0.0;
    g.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        if (norm<Dim>(g.point(k) - eta.center) <= eta.radius) m = std::max(m, norm<Dim>(grad[i]));
    });
    return m;
}

template <int Dim>
double level_flux(const ScalarField<Dim>& u, const CoefficientModel& a, const BumpTest<Dim>& eta,
                  const LevelSetCurve<Dim>& curve) {
    double s = 0.0;
    for (std::size_t e = 0; e < curve.elements.size(); ++e) {
        const auto x = curve.element_centroid(e);
        const double w = eta(x);
        if (w == 0.0) continue;
        s += curve.element_measure(e) * a(x) * norm<Dim>(interpolate_gradient(u, x)) * w;
    }
    return s;
}

} // namespace detail

/// Default levels: 2, 2.5, 3, 3.5, 4 times h max|grad u| over the support of eta.
template <int Dim>
std::vector<double> default_flux_levels(const ScalarField<Dim>& u, const BumpTest<Dim>& eta) {
    const double base = u.grid().h() * detail::max_gradient_in(u, eta);
    std::vector<double> out;
    for (int m = 4; m <= 8; ++m) out.push_back(0.5 * m * base);
    return out;
}

/// Two-sided flux integrals over {u = eps} and {u = -eps}, extrapolated
/// to eps = 0 by a quadratic least-squares fit. |grad u| is the multilinear cell gradient at each
/// element centroid; the resolvability condition keeps that cell inside the
/// phase.
template <int Dim>
FluxBalanceResult flux_balance(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p, const BumpTest<Dim>& eta,
                               std::vector<double> levels = {}) {
    eta.require_inside(u.grid());
    if (levels.empty()) levels = default_flux_levels(u, eta);
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (!(levels[k] < levels[k - 1]) && !(levels[k] > levels[k - 1]))
            throw PreconditionError("flux levels must be distinct");
    const double floor = 2.0 * u.grid().h() * detail::max_gradient_in(u, eta);
    for (double e : levels)
        if (!(e > 0.0) || e < floor * (1.0 - 1e-9))
            throw PreconditionError("flux level " + format_real(e, 6) + " is below 2 h max|grad u| = " +
                                    format_real(floor, 6));
    FluxBalanceResult out;
    for (double e : levels) {
        const auto cp = extract_level_set(u, e), cm = extract_level_set(u, -e);
        if (cp.empty() || cm.empty()) {
            out.notes.push_back("empty level set at eps = " + format_real(e, 6) + "; skipped");
            continue;
        }
        out.levels.push_back(e);
        out.plus.push_back(detail::level_flux(u, p.aplus, eta, cp));
        out.minus.push_back(detail::level_flux(u, p.aminus, eta, cm));
    }
    if (out.levels.empty()) {
        out.notes.push_back("no resolvable level; flux balance is vacuous");
        return out;
    }
    out.plus_limit = detail::extrapolate_to_zero(out.levels, out.plus);
    out.minus_limit = detail::extrapolate_to_zero(out.levels, out.minus);
    const double scale = std::max(std::abs(out.plus_limit), std::abs(out.minus_limit));
    out.mismatch = scale > 1e-14 ? std::abs(out.plus_limit - out.minus_limit) / scale : 0.0;
    return out;
}

} // namespace jumpfb
