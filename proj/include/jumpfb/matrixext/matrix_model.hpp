#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "../error.hpp"
#include "../field/coefficient.hpp"
#include "../field/grid.hpp"
#include "../field/model_syntax.hpp"

namespace jumpfb {

template <int Dim>
using Matrix = std::array<std::array<double, Dim>, Dim>;

template <int Dim>
Matrix<Dim> identity_matrix() {
    Matrix<Dim> m{};
    for (int d = 0; d < Dim; ++d) m[d][d] = 1.0;
    return m;
}

template <int Dim>
double frobenius(const Matrix<Dim>& m) {
    double s = 0.0;
    for (const auto& row : m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

/// Eigenvalues of a symmetric 2x2 or 3x3 matrix, ascending.
template <int Dim>
std::array<double, Dim> symmetric_eigenvalues(const Matrix<Dim>& m) {
    if constexpr (Dim == 2) {
        const double tr = 0.5 * (m[0][0] + m[1][1]);
        const double df = 0.5 * (m[0][0] - m[1][1]);
        const double rad = std::hypot(df, m[0][1]);
        return {tr - rad, tr + rad};
    } else {
        // trigonometric solution of the characteristic cubic
        const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
        const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        if (p1 == 0.0) {
            std::array<double, 3> e{m[0][0], m[1][1], m[2][2]};
            std::sort(e.begin(), e.end());
            return e;
        }
        const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                          (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        Matrix<3> b;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
        const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                            b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                            b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        const double r = std::clamp(detb / 2.0, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        const double e3 = q + 2.0 * p * std::cos(phi);
        const double e1 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        const double e2 = 3.0 * q - e1 - e3;
        std::array<double, 3> e{e1, e2, e3};
        std::sort(e.begin(), e.end());
        return e;
    }
}

struct ConstantMatrix {
    std::vector<std::vector<double>> m;
};

// P(x) = I + c |x - x0|^alpha S
struct HoelderPerturbedIdentity {
    double c;
    double alpha;
    std::vector<double> x0;
    std::vector<std::vector<double>> s;
};

/// Symmetric matrix field P(x) with lambda I <= P <= I / lambda.
class MatrixModel {
public:
    using Kind = std::variant<ConstantMatrix, HoelderPerturbedIdentity>;

    MatrixModel(Kind kind, double lambda) : kind_(std::move(kind)), lambda_(lambda) {
        if (!(lambda > 0.0 && lambda <= 1.0)) throw PreconditionError("ellipticity lambda must lie in (0, 1]");
        const auto& rows = matrix_rows();
        const std::size_t n = rows.size();
        if (n < 2 || n > 3) throw PreconditionError("matrix model must be 2x2 or 3x3");
        for (const auto& r : rows)
            if (r.size() != n) throw PreconditionError("matrix model must be square");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (rows[i][j] != rows[j][i]) throw PreconditionError("matrix model must be symmetric");
        if (auto* h = std::get_if<HoelderPerturbedIdentity>(&kind_))
            if (!(h->alpha > 0.0 && h->alpha <= 1.0)) throw PreconditionError("Hoelder exponent must lie in (0, 1]");
    }

    static MatrixModel identity(int dim, double lambda) {
        std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
        for (int d = 0; d < dim; ++d) m[d][d] = 1.0;
        return {ConstantMatrix{m}, lambda};
    }

    const Kind& kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    int dim() const { return static_cast<int>(matrix_rows().size()); }

    bool is_identity() const {
        const auto* c = std::get_if<ConstantMatrix>(&kind_);
        if (!c) return false;
        for (std::size_t i = 0; i < c->m.size(); ++i)
            for (std::size_t j = 0; j < c->m.size(); ++j)
                if (c->m[i][j] != (i == j ? 1.0 : 0.0)) return false;
        return true;
    }

    template <std::size_t N>
    Matrix<static_cast<int>(N)> operator()(const std::array<double, N>& x) const {
        constexpr int Dim = static_cast<int>(N);
        if (dim() != Dim) throw PreconditionError("matrix model dimension does not match the grid");
        Matrix<Dim> out{};
        if (const auto* c = std::get_if<ConstantMatrix>(&kind_)) {
            for (int i = 0; i < Dim; ++i)
                for (int j = 0; j < Dim; ++j) out[i][j] = c->m[i][j];
            return out;
        }
        const auto& h = std::get<HoelderPerturbedIdentity>(kind_);
        double r2 = 0.0;
        for (int d = 0; d < Dim; ++d) {
            const double c = d < static_cast<int>(h.x0.size()) ? h.x0[d] : 0.0;
            r2 += (x[d] - c) * (x[d] - c);
        }
        const double f = h.c * std::pow(std::sqrt(r2), h.alpha);
        for (int i = 0; i < Dim; ++i)
            for (int j = 0; j < Dim; ++j) out[i][j] = (i == j ? 1.0 : 0.0) + f * h.s[i][j];
        return out;
    }

    ModulusOfContinuity modulus() const {
        if (std::holds_alternative<ConstantMatrix>(kind_)) return {0.0, 1.0};
        const auto& h = std::get<HoelderPerturbedIdentity>(kind_);
        // spectral norm of S bounded by its Frobenius norm
        double fro = 0.0;
        for (const auto& r : h.s)
            for (double v : r) fro += v * v;
        return {std::abs(h.c) * std::sqrt(fro), h.alpha};
    }

    std::string to_string() const {
        auto mat = [](const std::vector<std::vector<double>>& m) {
            std::string s = "[";
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i) s += ";";
                for (std::size_t j = 0; j < m[i].size(); ++j) s += (j ? "," : "") + format_real(m[i][j]);
            }
            return s + "]";
        };
        if (const auto* c = std::get_if<ConstantMatrix>(&kind_)) return "constant(" + mat(c->m) + ")";
        const auto& h = std::get<HoelderPerturbedIdentity>(kind_);
        std::string x0 = "[";
        for (std::size_t i = 0; i < h.x0.size(); ++i) x0 += (i ? "," : "") + format_real(h.x0[i]);
        return "hoelder(" + format_real(h.c) + "," + format_real(h.alpha) + "," + x0 + "]," + mat(h.s) + ")";
    }

private:
    const std::vector<std::vector<double>>& matrix_rows() const {
        if (const auto* c = std::get_if<ConstantMatrix>(&kind_)) return c->m;
        return std::get<HoelderPerturbedIdentity>(kind_).s;
    }

    Kind kind_;
    double lambda_;
};

/// Accepts `identity(n)`, `diag(a, b[, c])`, `constant([a, b; b, c])` and
/// `hoelder(c, alpha, [x0...], [S rows])`.
inline MatrixModel parse_matrix_model(const std::string& text, double lambda) {
    ModelCall call = parse_model_call(text);
    if (call.name == "identity") {
        if (call.args.size() != 1) throw ConfigError("identity(n) expects the dimension");
        return MatrixModel::identity(static_cast<int>(call.args[0].number()), lambda);
    }
    if (call.name == "diag") {
        const std::size_t n = call.args.size();
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) m[i][i] = call.args[i].number();
        return {ConstantMatrix{m}, lambda};
    }
    if (call.name == "constant") {
        if (call.args.size() != 1) throw ConfigError("constant([rows]) expects one matrix argument");
        return {ConstantMatrix{call.args[0].rows()}, lambda};
    }
    if (call.name == "hoelder") {
        if (call.args.size() != 4) throw ConfigError("hoelder(c, alpha, [x0], [S]) expects four arguments");
        return {HoelderPerturbedIdentity{call.args[0].number(), call.args[1].number(), call.args[2].vector(),
                                         call.args[3].rows()},
                lambda};
    }
    throw ConfigError("unknown matrix model kind '" + call.name + "'");
}

/// Checks lambda I <= P(x) <= I / lambda at every node of the grid.
template <int Dim>
void check_matrix_ellipticity(const MatrixModel& model, const Grid<Dim>& grid) {
    const double lo = model.lambda(), hi = 1.0 / model.lambda();
    grid.for_each_node([&](const Index<Dim>& k, std::size_t) {
        const auto ev = symmetric_eigenvalues<Dim>(model(grid.point(k)));
        if (ev.front() < lo || ev.back() > hi)
            throw PreconditionError("matrix model " + model.to_string() + " violates ellipticity: eigenvalues [" +
                                    format_real(ev.front(), 6) + ", " + format_real(ev.back(), 6) + "]");
    });
}

} // namespace jumpfb
