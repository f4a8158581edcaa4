#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "grid.hpp"

namespace jumpfb {

/// One real value per grid node.
template <int Dim>
class ScalarField {
public:
    explicit ScalarField(const Grid<Dim>& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}

    ScalarField(const Grid<Dim>& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw PreconditionError("field size does not match grid");
    }

    const Grid<Dim>& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(const Index<Dim>& k) noexcept { return values_[grid_.ravel(k)]; }
    double at(const Index<Dim>& k) const noexcept { return values_[grid_.ravel(k)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    template <class F>
    ScalarField map(F&& f) const {
        ScalarField out(grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
        return out;
    }

    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }

private:
    Grid<Dim> grid_;
    std::vector<double> values_;
};

template <int Dim>
ScalarField<Dim> sample(const Grid<Dim>& grid, const std::function<double(const Point<Dim>&)>& f) {
    ScalarField<Dim> out(grid);
    grid.for_each_node([&](const Index<Dim>& k, std::size_t i) { out[i] = f(grid.point(k)); });
    return out;
}

template <int Dim>
ScalarField<Dim> positive_part(const ScalarField<Dim>& u) {
    return u.map([](double v) { return v > 0.0 ? v : 0.0; });
}

template <int Dim>
ScalarField<Dim> negative_part(const ScalarField<Dim>& u) {
    return u.map([](double v) { return v < 0.0 ? -v : 0.0; });
}

template <int Dim>
double max_abs_difference(const ScalarField<Dim>& a, const ScalarField<Dim>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace jumpfb
