#pragma once

#include <algorithm>
#include <cmath>

#include "../error.hpp"

namespace jumpfb {

/// Linear ramp: 0 for s <= 0, s/eps on [0, eps], 1 above eps.
/// psi_eps(0) = 0 keeps the a_- branch at the tie, matching H(0) = 0.
inline double smoothed_heaviside(double eps, double s) {
    if (!(eps > 0.0)) throw PreconditionError("smoothing width must be positive");
    if (s <= 0.0) return 0.0;
    if (s >= eps) return 1.0;
    return s / eps;
}

/// Antiderivative of the ramp, Psi_eps(s) = int_{-inf}^s psi_eps.
inline double smoothed_positive_part(double eps, double s) {
    if (!(eps > 0.0)) throw PreconditionError("smoothing width must be positive");
    if (s <= 0.0) return 0.0;
    if (s >= eps) return s - 0.5 * eps;
    return 0.5 * s * s / eps;
}

/// Mean of psi_eps over the segment between a and b:
/// (Psi_eps(b) - Psi_eps(a)) / (b - a), evaluated without cancellation.
/// This is the exact edge average of psi_eps(u) when u is linear along the
/// edge, which makes the flux consistent with the transform
/// s -> a_- s + (a_+ - a_-) Psi_eps(s).
inline double ramp_edge_mean(double eps, double a, double b) {
    if (a > b) std::swap(a, b);
    const double len = b - a;
    if (len <= 1e-14 * eps) return smoothed_heaviside(eps, 0.5 * (a + b));
    double acc = 0.0;
    // part above eps contributes 1 per unit length
    if (b > eps) acc += b - std::max(a, eps);
    // part on the ramp contributes int t/eps dt
    const double lo = std::max(a, 0.0), hi = std::min(b, eps);
    if (hi > lo) acc += (hi - lo) * (hi + lo) / (2.0 * eps);
    return acc / len;
}

} // namespace jumpfb
