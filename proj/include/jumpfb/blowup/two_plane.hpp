#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../field/calculus.hpp"
#include "../field/quadrature.hpp"
#include "../solver/problem.hpp"

namespace jumpfb {

/// P(x) = beta/a_+(z) ((x-z).nu)^+ - beta/a_-(z) ((x-z).nu)^- with unit nu.
template <int Dim>
struct TwoPlane {
    double beta = 1.0;
    Point<Dim> nu = unit_axis<Dim>(0);
    Point<Dim> z{};
    double aplus_z = 1.0;
    double aminus_z = 1.0;

    TwoPlane() = default;
    TwoPlane(double b, const Point<Dim>& n, const Point<Dim>& centre, double ap, double am)
        : beta(b), nu(n), z(centre), aplus_z(ap), aminus_z(am) {
        if (!(beta > 0.0)) throw PreconditionError("two-plane slope beta must be positive");
        if (!(ap > 0.0 && am > 0.0)) throw PreconditionError("two-plane coefficients must be positive");
        if (std::abs(norm<Dim>(nu) - 1.0) > 1e-9) throw PreconditionError("two-plane normal must be a unit vector");
    }

    double operator()(const Point<Dim>& x) const { return two_plane_value<Dim>(beta, nu, aplus_z, aminus_z, z, x); }

    ScalarField<Dim> sample_on(const Grid<Dim>& g) const {
        return sample<Dim>(g, [this](const Point<Dim>& x) { return (*this)(x); });
    }
};

/// w = a_+(z) u^+ - a_-(z) u^-.
template <int Dim>
ScalarField<Dim> broken_harmonic(const ScalarField<Dim>& u, double aplus_z, double aminus_z) {
    if (!(aplus_z > 0.0 && aminus_z > 0.0)) throw PreconditionError("coefficient values must be positive");
    return u.map([=](double v) { return v > 0.0 ? aplus_z * v : aminus_z * v; });
}

/// Unit-ball grid used for rescaled fields.
template <int Dim>
Grid<Dim> unit_grid(int cells) {
    return Grid<Dim>(1.0, cells);
}

/// u_{z,r}(x) = u(r x + z) r^(n/2) / |u|_{L2(B_r(z))}, resampled onto
/// `target` by multilinear interpolation; zero when the norm vanishes.
/// Target nodes mapping outside the source box are clamped to it.
template <int Dim>
ScalarField<Dim> rescale(const ScalarField<Dim>& u, const Point<Dim>& z, double r, const Grid<Dim>& target) {
    const double n2 = l2_ball_norm(u, z, r);
    ScalarField<Dim> out(target);
    if (n2 == 0.0) return out;
    const double scale = std::pow(r, 0.5 * Dim) / n2;
    target.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        out[i] = scale * interpolate(u, z + r * target.point(k));
    });
    return out;
}

/// u(r x + z) / r on `target`, the unnormalised blowup used by the cascade.
template <int Dim>
ScalarField<Dim> rescale_linear(const ScalarField<Dim>& u, const Point<Dim>& z, double r, const Grid<Dim>& target) {
    ScalarField<Dim> out(target);
    target.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        out[i] = interpolate(u, z + r * target.point(k)) / r;
    });
    return out;
}

struct FitDiagnostics {
    int gauss_newton_steps = 0;
    bool improved = false;  // the polish lowered the deficit
    bool diverged = false;  // a polish step was rejected
};

template <int Dim>
struct TwoPlaneFit {
    TwoPlane<Dim> plane;
    double deficit = 0.0;  // |v - P|_{L2(B_1)}
    FitDiagnostics diagnostics;
};

namespace detail {

template <int Dim>
double two_plane_deficit(const std::vector<WeightedNode>& nodes, const ScalarField<Dim>& v, double beta,
                         const Point<Dim>& nu, double ap, double am) {
    const auto& g = v.grid();
    double s = 0.0;
    for (const auto& w : nodes) {
        const double e = v[w.index] - two_plane_value<Dim>(beta, nu, ap, am, Point<Dim>{}, g.point(w.index));
        s += w.weight * e * e;
    }
    return std::sqrt(s);
}

// Orthonormal basis of the plane orthogonal to the unit vector nu.
template <int Dim>
std::vector<Point<Dim>> tangent_basis(const Point<Dim>& nu) {
    std::vector<Point<Dim>> t;
    if constexpr (Dim == 2) {
        t.push_back({-nu[1], nu[0]});
    } else {
        int k = 0;
        for (int d = 1; d < 3; ++d)
            if (std::abs(nu[d]) < std::abs(nu[k])) k = d;
        Point<3> e{};
        e[k] = 1.0;
        Point<3> a = e - dot<3>(e, nu) * nu;
        a = (1.0 / norm<3>(a)) * a;
        const Point<3> b{nu[1] * a[2] - nu[2] * a[1], nu[2] * a[0] - nu[0] * a[2], nu[0] * a[1] - nu[1] * a[0]};
        t.push_back(a);
        t.push_back(b);
    }
    return t;
}

} // namespace detail

/// Least-squares two-plane fit on B_1: nu from the mean gradient of the
/// broken-harmonic transform, beta by projection, then Gauss-Newton steps
/// on (beta, nu) kept only while they lower the deficit.
template <int Dim>
TwoPlaneFit<Dim> fit_two_plane(const ScalarField<Dim>& v, double aplus_z, double aminus_z, int polish_steps = 3) {
    const auto& g = v.grid();
    const auto nodes = ball_node_weights(g, Point<Dim>{}, 1.0);
    double vn = 0.0;
    for (const auto& w : nodes) vn += w.weight * v[w.index] * v[w.index];
    if (!(vn > 0.0)) throw PreconditionError("cannot fit a two-plane profile to a vanishing field");

    const auto w = broken_harmonic(v, aplus_z, aminus_z);
    const auto grad = gradient_field(w);
    Point<Dim> mean{};
    for (const auto& n : nodes) mean = mean + n.weight * grad[n.index];
    if (norm<Dim>(mean) == 0.0) mean = unit_axis<Dim>(0);
    Point<Dim> nu = (1.0 / norm<Dim>(mean)) * mean;

    const auto project_beta = [&](const Point<Dim>& n) {
        double num = 0.0, den = 0.0;
        for (const auto& q : nodes) {
            const double f = two_plane_value<Dim>(1.0, n, aplus_z, aminus_z, Point<Dim>{}, g.point(q.index));
            num += q.weight * f * v[q.index];
            den += q.weight * f * f;
        }
        return den > 0.0 ? num / den : 0.0;
    };
    double beta = project_beta(nu);
    if (beta <= 0.0) {
        nu = -1.0 * nu;
        beta = project_beta(nu);
    }
    double best = detail::two_plane_deficit(nodes, v, beta, nu, aplus_z, aminus_z);

    TwoPlaneFit<Dim> out;
    for (int step = 0; step < polish_steps && best > 0.0; ++step) {
        // unknowns: beta and the tangential rotation of nu
        const auto tb = detail::tangent_basis<Dim>(nu);
        constexpr int P = Dim;  // 1 + (Dim - 1)
        Eigen::Matrix<double, P, P> jtj = Eigen::Matrix<double, P, P>::Zero();
        Eigen::Matrix<double, P, 1> jtr = Eigen::Matrix<double, P, 1>::Zero();
        for (const auto& q : nodes) {
            const Point<Dim> x = g.point(q.index);
            const double s = dot<Dim>(x, nu);
            const double slope = s > 0.0 ? 1.0 / aplus_z : 1.0 / aminus_z;
            Eigen::Matrix<double, P, 1> jrow;
            jrow(0) = slope * s;
            for (int t = 0; t < Dim - 1; ++t) jrow(t + 1) = beta * slope * dot<Dim>(x, tb[t]);
            const double r = v[q.index] - beta * slope * s;
            jtr += q.weight * r * jrow;
            jtj += q.weight * jrow * jrow.transpose();
        }
        const Eigen::LDLT<Eigen::Matrix<double, P, P>> ldlt(jtj);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
        const Eigen::Matrix<double, P, 1> delta = ldlt.solve(jtr);
        const double nb = beta + delta(0);
        Point<Dim> nn = nu;
        for (int t = 0; t < Dim - 1; ++t) nn = nn + delta(t + 1) * tb[t];
        nn = (1.0 / norm<Dim>(nn)) * nn;
        const double trial = nb > 0.0 ? detail::two_plane_deficit(nodes, v, nb, nn, aplus_z, aminus_z) : INFINITY;
        ++out.diagnostics.gauss_newton_steps;
        if (!(trial < best)) {
            out.diagnostics.diverged = trial > best * (1.0 + 1e-12);
            break;
        }
        out.diagnostics.improved = true;
        best = trial;
        beta = nb;
        nu = nn;
    }
    out.plane = TwoPlane<Dim>(beta, nu, Point<Dim>{}, aplus_z, aminus_z);
    out.deficit = best;
    return out;
}

} // namespace jumpfb
