#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "../field/coefficient.hpp"
#include "../field/scalar_field.hpp"
#include "../matrixext/matrix_model.hpp"

namespace jumpfb {

/// Dirichlet data g, defined on the whole box (only box-boundary values
/// are imposed; the interior values serve as the initial guess).
template <int Dim>
struct BoundaryData {
    std::function<double(const Point<Dim>&)> g;
    std::string description;

    double operator()(const Point<Dim>& x) const { return g(x); }
};

/// Profile beta/a_+ (x.nu)^+ - beta/a_- (x.nu)^- centred at z, with a_+ and
/// a_- the coefficient values frozen at z. nu need not be normalised here.
template <int Dim>
double two_plane_value(double beta, const Point<Dim>& nu, double aplus_z, double aminus_z, const Point<Dim>& z,
                       const Point<Dim>& x) {
    const double s = dot<Dim>(x - z, nu);
    return s > 0.0 ? beta / aplus_z * s : beta / aminus_z * s;
}

namespace boundary {

template <int Dim>
BoundaryData<Dim> zero() {
    return {[](const Point<Dim>&) { return 0.0; }, "zero()"};
}

template <int Dim>
BoundaryData<Dim> linear(const Point<Dim>& c) {
    std::string d = "linear([";
    for (int i = 0; i < Dim; ++i) d += (i ? "," : "") + format_real(c[i]);
    return {[c](const Point<Dim>& x) { return dot<Dim>(c, x); }, d + "])"};
}

template <int Dim>
BoundaryData<Dim> two_plane(double beta, const Point<Dim>& nu, double aplus_z, double aminus_z,
                            const Point<Dim>& z = Point<Dim>{}) {
    std::string d = "twoplane(" + format_real(beta) + ",[";
    for (int i = 0; i < Dim; ++i) d += (i ? "," : "") + format_real(nu[i]);
    return {[=](const Point<Dim>& x) { return two_plane_value<Dim>(beta, nu, aplus_z, aminus_z, z, x); },
            d + "])"};
}

template <int Dim>
BoundaryData<Dim> saddle() {
    return {[](const Point<Dim>& x) { return x[0] * x[1]; }, "saddle()"};
}

template <int Dim>
BoundaryData<Dim> sphere(double radius) {
    return {[radius](const Point<Dim>& x) { return dot<Dim>(x, x) - radius * radius; },
            "sphere(" + format_real(radius) + ")"};
}

} // namespace boundary

/// Accepts `zero()`, `linear([c...])`, `twoplane(beta, [nu...])`,
/// `saddle()` and `sphere(r)`. The two-plane profile uses the coefficient
/// values a_+(0), a_-(0) passed in.
template <int Dim>
BoundaryData<Dim> parse_boundary(const std::string& text, double aplus0, double aminus0) {
    const ModelCall call = parse_model_call(text);
    const auto need = [&](std::size_t n) {
        if (call.args.size() != n)
            throw ConfigError("boundary '" + text + "' expects " + std::to_string(n) + " arguments");
    };
    const auto point = [&](const ModelArg& a) {
        const auto v = a.vector();
        if (v.size() != static_cast<std::size_t>(Dim))
            throw ConfigError("boundary '" + text + "': vector has the wrong dimension");
        Point<Dim> p;
        for (int d = 0; d < Dim; ++d) p[d] = v[d];
        return p;
    };
    if (call.name == "zero") {
        need(0);
        return boundary::zero<Dim>();
    }
    if (call.name == "linear") {
        need(1);
        return boundary::linear<Dim>(point(call.args[0]));
    }
    if (call.name == "twoplane") {
        need(2);
        const double beta = call.args[0].number();
        Point<Dim> nu = point(call.args[1]);
        const double n = norm<Dim>(nu);
        if (!(beta > 0.0) || !(n > 0.0)) throw ConfigError("boundary '" + text + "': need beta > 0 and nu != 0");
        return boundary::two_plane<Dim>(beta, (1.0 / n) * nu, aplus0, aminus0);
    }
    if (call.name == "saddle") {
        need(0);
        return boundary::saddle<Dim>();
    }
    if (call.name == "sphere") {
        need(1);
        return boundary::sphere<Dim>(call.args[0].number());
    }
    throw ConfigError("unknown boundary kind '" + call.name + "'");
}

/// Coefficients a_+(x), a_-(x) (optionally times a matrix P(x)), ellipticity
/// lambda, Dirichlet data g and the modulus of continuity of the
/// coefficients.
template <int Dim>
struct TwoPhaseProblem {
    CoefficientModel aplus;
    CoefficientModel aminus;
    std::optional<MatrixModel> matrix;
    BoundaryData<Dim> boundary;
    double lambda;
    ModulusOfContinuity modulus;

    TwoPhaseProblem(CoefficientModel ap, CoefficientModel am, BoundaryData<Dim> g, double lam,
                    std::optional<MatrixModel> p = std::nullopt)
        : aplus(std::move(ap)), aminus(std::move(am)), matrix(std::move(p)), boundary(std::move(g)), lambda(lam) {
        if (!(lambda > 0.0 && lambda <= 1.0)) throw PreconditionError("ellipticity lambda must lie in (0, 1]");
        if (aplus.lambda() != lambda || aminus.lambda() != lambda)
            throw PreconditionError("coefficient models must share the problem's lambda");
        if (matrix && matrix->lambda() != lambda)
            throw PreconditionError("matrix model must share the problem's lambda");
        if (matrix && matrix->dim() != Dim) throw PreconditionError("matrix model dimension mismatch");
        modulus = ModulusOfContinuity::combine(aplus.modulus(Dim), aminus.modulus(Dim));
        if (matrix) modulus = ModulusOfContinuity::combine(modulus, matrix->modulus());
    }

    bool scalar() const { return !matrix || matrix->is_identity(); }
};

} // namespace jumpfb
