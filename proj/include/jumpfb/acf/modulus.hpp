#pragma once

#include <cmath>

#include "../error.hpp"
#include "../field/coefficient.hpp"

namespace jumpfb {

struct PsiG {
    double psi;
    double g;
};

/// Dini correction for omega(r) = w0 r^a. With D(r) the Dini integral
/// w0 r^a / a,
///   psi(r) = omega(r) + D(r) + D(r)^2,   g(r) = integral_0^r psi.
inline PsiG modulus_psi_g(const ModulusOfContinuity& m, double r) {
    if (!(m.exponent > 0.0)) throw PreconditionError("modulus exponent must be positive");
    if (!(r > 0.0 && r < 1.0)) throw PreconditionError("psi/g are evaluated for 0 < r < 1");
    const double w0 = m.amplitude, a = m.exponent;
    if (w0 == 0.0) return {0.0, 0.0};
    const double ra = std::pow(r, a);
    const double dini = w0 * ra / a;
    const double psi = w0 * ra + dini + dini * dini;
    const double g = w0 * ra * r / (a + 1.0) + w0 * ra * r / (a * (a + 1.0)) +
                     w0 * w0 * ra * ra * r / (a * a * (2.0 * a + 1.0));
    return {psi, g};
}

} // namespace jumpfb
