#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"
#include "io.hpp"
#include "model_syntax.hpp"
#include "scalar_field.hpp"

namespace jumpfb {

/// omega(r) = amplitude * r^exponent. Dini integral is amplitude/exponent.
struct ModulusOfContinuity {
    double amplitude = 0.0;
    double exponent = 1.0;

    double operator()(double r) const { return r <= 0.0 ? 0.0 : amplitude * std::pow(r, exponent); }
    double dini_integral(double r = 1.0) const { return (*this)(r) / exponent; }

    static ModulusOfContinuity combine(const ModulusOfContinuity& a, const ModulusOfContinuity& b) {
        if (a.amplitude == 0.0) return b;
        if (b.amplitude == 0.0) return a;
        // On r <= 1 a larger amplitude with the smaller exponent dominates both.
        return {std::max(a.amplitude, b.amplitude), std::min(a.exponent, b.exponent)};
    }
};

struct ConstantCoefficient {
    double a0;
};

// a(x) = a0 + c |x - x0|^alpha
struct HoelderCoefficient {
    double a0;
    double c;
    std::vector<double> x0;
    double alpha;
};

// Lipschitz closed forms selected by id:
//   cosprod: a0 + c * prod_d cos(x_d)
//   gauss:   a0 + c * exp(-|x|^2)
struct SmoothCoefficient {
    std::string id;
    double a0;
    double c;
};

class CoefficientModel {
public:
    using Kind = std::variant<ConstantCoefficient, HoelderCoefficient, SmoothCoefficient>;

    CoefficientModel(Kind kind, double lambda) : kind_(std::move(kind)), lambda_(lambda) {
        if (!(lambda > 0.0 && lambda <= 1.0)) throw PreconditionError("ellipticity lambda must lie in (0, 1]");
        if (auto* h = std::get_if<HoelderCoefficient>(&kind_)) {
            if (!(h->alpha > 0.0 && h->alpha <= 1.0))
                throw PreconditionError("Hoelder exponent must lie in (0, 1]");
            if (h->c < 0.0) throw PreconditionError("Hoelder amplitude must be nonnegative");
        }
        if (auto* s = std::get_if<SmoothCoefficient>(&kind_)) {
            if (s->id != "cosprod" && s->id != "gauss")
                throw PreconditionError("unknown smooth coefficient id '" + s->id + "'");
        }
    }

    static CoefficientModel constant(double a0, double lambda) { return {ConstantCoefficient{a0}, lambda}; }
    static CoefficientModel hoelder(double a0, double c, std::vector<double> x0, double alpha, double lambda) {
        return {HoelderCoefficient{a0, c, std::move(x0), alpha}, lambda};
    }

    const Kind& kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    bool is_constant() const noexcept { return std::holds_alternative<ConstantCoefficient>(kind_); }

    template <std::size_t N>
    double operator()(const std::array<double, N>& x) const {
        constexpr int Dim = static_cast<int>(N);
        return std::visit(
            [&](const auto& m) -> double {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, ConstantCoefficient>) {
                    return m.a0;
                } else if constexpr (std::is_same_v<M, HoelderCoefficient>) {
                    double r2 = 0.0;
                    for (int d = 0; d < Dim; ++d) {
                        double c = d < static_cast<int>(m.x0.size()) ? m.x0[d] : 0.0;
                        r2 += (x[d] - c) * (x[d] - c);
                    }
                    return m.a0 + m.c * std::pow(std::sqrt(r2), m.alpha);
                } else {
                    if (m.id == "cosprod") {
                        double p = 1.0;
                        for (int d = 0; d < Dim; ++d) p *= std::cos(x[d]);
                        return m.a0 + m.c * p;
                    }
                    return m.a0 + m.c * std::exp(-dot<Dim>(x, x));
                }
            },
            kind_);
    }

    // |a(x) - a(y)| <= omega(|x - y|). For the Hoelder kind the reverse
    // triangle inequality for |.|^alpha gives amplitude c.
    ModulusOfContinuity modulus(int dim) const {
        return std::visit(
            [&](const auto& m) -> ModulusOfContinuity {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, ConstantCoefficient>) {
                    return {0.0, 1.0};
                } else if constexpr (std::is_same_v<M, HoelderCoefficient>) {
                    return {m.c, m.alpha};
                } else {
                    double lip = m.id == "cosprod" ? std::abs(m.c) * std::sqrt(double(dim))
                                                   : std::abs(m.c) * std::sqrt(2.0 / std::exp(1.0));
                    return {lip, 1.0};
                }
            },
            kind_);
    }

    std::string to_string() const {
        return std::visit(
            [](const auto& m) -> std::string {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, ConstantCoefficient>) {
                    return "constant(" + format_real(m.a0) + ")";
                } else if constexpr (std::is_same_v<M, HoelderCoefficient>) {
                    std::string x0 = "[";
                    for (std::size_t i = 0; i < m.x0.size(); ++i) x0 += (i ? "," : "") + format_real(m.x0[i]);
                    x0 += "]";
                    return "hoelder(" + format_real(m.a0) + "," + format_real(m.c) + "," + x0 + "," +
                           format_real(m.alpha) + ")";
                } else {
                    return "smooth(" + m.id + "," + format_real(m.a0) + "," + format_real(m.c) + ")";
                }
            },
            kind_);
    }

private:
    Kind kind_;
    double lambda_;
};

/// Accepts `constant(a0)`, `hoelder(a0, c, [x0...], alpha)` and
/// `smooth(id, a0, c)`.
inline CoefficientModel parse_coefficient(const std::string& text, double lambda) {
    ModelCall call = parse_model_call(text);
    auto need = [&](std::size_t n) {
        if (call.args.size() != n)
            throw ConfigError("coefficient '" + text + "' expects " + std::to_string(n) + " arguments");
    };
    if (call.name == "constant") {
        need(1);
        return CoefficientModel::constant(call.args[0].number(), lambda);
    }
    if (call.name == "hoelder") {
        need(4);
        return CoefficientModel::hoelder(call.args[0].number(), call.args[1].number(), call.args[2].vector(),
                                         call.args[3].number(), lambda);
    }
    if (call.name == "smooth") {
        need(3);
        return {SmoothCoefficient{call.args[0].word(), call.args[1].number(), call.args[2].number()}, lambda};
    }
    throw ConfigError("unknown coefficient kind '" + call.name + "'");
}

/// Nodal samples of a(x); every value must lie in [lambda, 1/lambda].
template <int Dim>
ScalarField<Dim> sample_coefficient(const CoefficientModel& model, const Grid<Dim>& grid) {
    const double lo = model.lambda(), hi = 1.0 / model.lambda();
    ScalarField<Dim> a(grid);
    grid.for_each_node([&](const Index<Dim>& k, std::size_t i) {
        const Point<Dim> x = grid.point(k);
        const double v = model(x);
        if (!std::isfinite(v) || v < lo || v > hi) {
            std::string where;
            for (int d = 0; d < Dim; ++d) where += (d ? "," : "") + format_real(x[d], 6);
            throw PreconditionError("coefficient " + model.to_string() + " = " + format_real(v, 6) + " at (" +
                                    where + ") leaves [" + format_real(lo, 6) + ", " + format_real(hi, 6) + "]");
        }
        a[i] = v;
    });
    return a;
}

} // namespace jumpfb
