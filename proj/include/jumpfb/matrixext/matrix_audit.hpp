#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../acf/monotonicity.hpp"
#include "../solver/picard.hpp"
#include "matrix_model.hpp"

namespace jumpfb {

/// Problem with conductivities a_+(x) P(x) and a_-(x) P(x).
template <int Dim>
TwoPhaseProblem<Dim> matrix_problem(const CoefficientModel& aplus, const CoefficientModel& aminus,
                                    const MatrixModel& p, BoundaryData<Dim> boundary) {
    if (p.dim() != Dim) throw PreconditionError("matrix model dimension does not match the problem");
    return TwoPhaseProblem<Dim>(aplus, aminus, std::move(boundary), p.lambda(), p);
}

/// kappa with A_+ = kappa A_-, taken as trace(A_+) / trace(A_-); throws
/// ProportionalityFailure when |A_+ - kappa A_-|_F > 1e-10 |A_+|_F.
template <int Dim>
double kappa_check(const Matrix<Dim>& ap, const Matrix<Dim>& am) {
    for (const auto* m : {&ap, &am}) {
        for (int i = 0; i < Dim; ++i)
            for (int j = 0; j < i; ++j)
                if ((*m)[i][j] != (*m)[j][i]) throw PreconditionError("kappa check needs symmetric matrices");
        if (!(symmetric_eigenvalues<Dim>(*m)[0] > 0.0))
            throw PreconditionError("kappa check needs positive definite matrices");
    }
    double tp = 0.0, tm = 0.0;
    for (int d = 0; d < Dim; ++d) {
        tp += ap[d][d];
        tm += am[d][d];
    }
    const double kappa = tp / tm;
    Matrix<Dim> r;
    for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) r[i][j] = ap[i][j] - kappa * am[i][j];
    const double res = frobenius<Dim>(r);
    if (res > 1e-10 * frobenius<Dim>(ap))
        throw ProportionalityFailure("A_+ is not a multiple of A_-: |A_+ - kappa A_-|_F = " + format_real(res, 6),
                                     res);
    return kappa;
}

/// A_+(z), A_-(z) of a problem (P = I for scalar problems).
template <int Dim>
std::pair<Matrix<Dim>, Matrix<Dim>> conductivity_at(const TwoPhaseProblem<Dim>& p, const Point<Dim>& z) {
    const Matrix<Dim> P = p.matrix ? (*p.matrix)(z) : identity_matrix<Dim>();
    Matrix<Dim> ap, am;
    const double a = p.aplus(z), b = p.aminus(z);
    for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) {
            ap[i][j] = a * P[i][j];
            am[i][j] = b * P[i][j];
        }
    return {ap, am};
}

template <int Dim>
struct MatrixAcfResult {
    std::optional<MonotonicityResult<Dim>> acf;  // empty when the audit does not apply
    double kappa = 0.0;
    std::vector<double> phi_transformed;  // Phi of u(P(z)^(1/2) y + z), NaN where not resolvable
    Verdict verdict = Verdict::na;
    std::vector<std::string> notes;

    AuditReport audit() const {
        AuditReport a = acf ? acf->audit("matrix-acf") : AuditReport{};
        a.name = "matrix-acf";
        a.add("kappa", kappa);
        if (!phi_transformed.empty()) a.add_series("phi_transformed", phi_transformed);
        a.verdict = verdict;
        for (const auto& n : notes) a.notes.push_back(n);
        return a;
    }
};

namespace detail {

// Phi of the field pulled back by y -> P^(1/2) y + z, on a grid with the
// same cell count sized so the image stays inside the source box.
template <int Dim>
std::vector<double> transformed_phi(const ScalarField<Dim>& u, const Matrix<Dim>& P, const Point<Dim>& z,
                                    const std::vector<double>& radii) {
    Eigen::Matrix<double, Dim, Dim> m;
    for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) m(i, j) = P[i][j];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> es(m);
    const Eigen::Matrix<double, Dim, Dim> root = es.operatorSqrt();
    const auto& g = u.grid();
    double room = g.radius();
    for (int d = 0; d < Dim; ++d) room = std::min(room, g.radius() - std::abs(z[d]));
    // |P^(1/2) y|_inf <= |P^(1/2)|_2 |y|_2 <= |P^(1/2)|_2 sqrt(Dim) |y|_inf
    const double stretch = std::sqrt(es.eigenvalues().maxCoeff()) * std::sqrt(double(Dim));
    const Grid<Dim> yg(room / stretch, g.cells());
    ScalarField<Dim> v(yg);
    yg.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        const auto y = yg.point(k);
        Point<Dim> x = z;
        for (int a = 0; a < Dim; ++a)
            for (int b = 0; b < Dim; ++b) x[a] += root(a, b) * y[b];
        v[i] = interpolate(u, x);
    });
    const auto vp = positive_part(v), vm = negative_part(v);
    std::vector<double> out;
    for (double r : radii) {
        if (r < 4.0 * yg.h() || r > yg.radius() - 2.0 * yg.h()) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        out.push_back(weighted_energy(vp, Point<Dim>{}, r) * weighted_energy(vm, Point<Dim>{}, r) / std::pow(r, 4));
    }
    return out;
}

} // namespace detail

/// Monotonicity audit for matrix problems, applicable when A_+(z) and
/// A_-(z) are proportional. Phi uses the isotropic weight in the original
/// coordinates; the transformed-coordinate Phi is reported alongside.
template <int Dim>
MatrixAcfResult<Dim> acf_matrix_audit(const ScalarField<Dim>& u, const Matrix<Dim>& aplus_z,
                                      const Matrix<Dim>& aminus_z, const Matrix<Dim>& p_z,
                                      const ModulusOfContinuity& modulus, const Point<Dim>& z,
                                      const std::vector<double>& radii, const MonotonicityOptions& opt = {}) {
    MatrixAcfResult<Dim> out;
    try {
        out.kappa = kappa_check<Dim>(aplus_z, aminus_z);
    } catch (const ProportionalityFailure& e) {
        out.verdict = Verdict::na;
        out.notes.push_back(std::string("ProportionalityFailure: ") + e.what());
        return out;
    }
    out.acf = monotonicity_audit(u, modulus, z, radii, opt);
    out.verdict = out.acf->verdict;
    out.phi_transformed = detail::transformed_phi<Dim>(u, p_z, z, radii);
    out.notes.push_back("Phi uses the isotropic weight |x|^(2-n); the P(z)-anisotropic weight is not evaluated");
    return out;
}

template <int Dim>
MatrixAcfResult<Dim> acf_matrix_audit(const ScalarField<Dim>& u, const TwoPhaseProblem<Dim>& p, const Point<Dim>& z,
                                      const std::vector<double>& radii, const MonotonicityOptions& opt = {}) {
    const auto [ap, am] = conductivity_at(p, z);
    const Matrix<Dim> P = p.matrix ? (*p.matrix)(z) : identity_matrix<Dim>();
    return acf_matrix_audit<Dim>(u, ap, am, P, p.modulus, z, radii, opt);
}

/// Dense free-row matrix of an operator, by probing with unit vectors.
/// Intended for small grids.
template <int Dim>
Eigen::MatrixXd dense_free_matrix(const StencilOperator<Dim>& op) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < op.fixed.size(); ++i)
        if (!op.fixed[i]) free.push_back(i);
    if (free.size() > 5000) throw PreconditionError("dense matrix requested for a large grid");
    Eigen::MatrixXd m(free.size(), free.size());
    std::vector<double> e(op.fixed.size(), 0.0), y;
    for (std::size_t c = 0; c < free.size(); ++c) {
        e[free[c]] = 1.0;
        op.apply(e, y);
        e[free[c]] = 0.0;
        for (std::size_t r = 0; r < free.size(); ++r) m(r, c) = y[free[r]];
    }
    return m;
}

struct DefinitenessCheck {
    double gershgorin_margin = 0.0;  // min_i a_ii - sum_j |a_ij|
    double asymmetry = 0.0;          // max |a_ij - a_ji|
    bool cholesky_ok = false;
};

template <int Dim>
DefinitenessCheck check_definiteness(const StencilOperator<Dim>& op) {
    const auto m = dense_free_matrix(op);
    DefinitenessCheck out;
    out.gershgorin_margin = INFINITY;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (j != i) off += std::abs(m(i, j));
        out.gershgorin_margin = std::min(out.gershgorin_margin, m(i, i) - off);
    }
    out.asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
    out.cholesky_ok = Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
    return out;
}

} // namespace jumpfb
