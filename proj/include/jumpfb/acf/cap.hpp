#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "../field/calculus.hpp"
#include "../field/io.hpp"
#include "../report/audit.hpp"

namespace jumpfb {

struct CapCharacteristic {
    double beta = 0.0;     // pi / theta
    double lambda = 0.0;   // (pi / theta)^2, principal eigenvalue of the arc
    double theta = 0.0;    // angle of the largest arc
    int arcs = 0;
    bool multi_arc = false;
    bool degenerate = false;  // largest arc shorter than two samples
    int samples = 0;
};

/// beta_+ (sign = +1) or beta_- (sign = -1) of the trace of u on the circle
/// of radius r about z. The circle is sampled by bilinear interpolation and
/// arc ends are located by bisection on the interpolated trace.
inline CapCharacteristic cap_characteristic(const ScalarField<2>& u, const Point<2>& z, double r, int sign) {
    if (sign != 1 && sign != -1) throw PreconditionError("sign must be +1 or -1");
    if (!(r > 0.0)) throw PreconditionError("circle radius must be positive");
    const auto& g = u.grid();
    if (!g.contains_ball(z, r)) throw PreconditionError("circle leaves the grid box");
    const double pi = std::numbers::pi;
    const int m = std::max(64, static_cast<int>(std::ceil(2.0 * pi * r / (g.h() / 4.0))));
    const double dtheta = 2.0 * pi / m;
    const auto trace = [&](double t) {
        return sign * interpolate(u, Point<2>{z[0] + r * std::cos(t), z[1] + r * std::sin(t)});
    };
    std::vector<double> s(m);
    for (int j = 0; j < m; ++j) s[j] = trace(j * dtheta);
    // fraction of the step (j-1, j) on which the trace is positive, the
    // sign change located by bisection
    const auto positive_fraction = [&](int j, bool rising) {
        double lo = (j - 1) * dtheta, hi = j * dtheta;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((trace(mid) > 0.0) == rising ? hi : lo) = mid;
        }
        const double cross = 0.5 * (lo + hi);
        return rising ? (j * dtheta - cross) / dtheta : (cross - (j - 1) * dtheta) / dtheta;
    };
    CapCharacteristic out;
    out.samples = m;
    const auto positive = [&](int j) { return s[((j % m) + m) % m] > 0.0; };
    int start = -1;
    for (int j = 0; j < m; ++j)
        if (!positive(j) && positive(j + 1)) {
            start = j + 1;
            break;
        }
    if (start < 0) {
        if (!positive(0)) throw EmptyCap("no positive arc on the circle of radius " + format_real(r, 6));
        out.arcs = 1;
        out.theta = 2.0 * pi;
    } else {
        // walk once around the circle from the first rising edge
        for (int j = start; j < start + m;) {
            if (!positive(j)) {
                ++j;
                continue;
            }
            int e = j;
            while (positive(e + 1)) ++e;
            const double lead = positive_fraction(j, true);
            const double trail = positive_fraction(e + 1, false);
            const double theta = (e - j + lead + trail) * dtheta;
            ++out.arcs;
            out.theta = std::max(out.theta, theta);
            j = e + 1;
        }
    }
    out.multi_arc = out.arcs > 1;
    out.degenerate = out.theta < 2.0 * dtheta;
    out.beta = pi / out.theta;
    out.lambda = out.beta * out.beta;
    return out;
}

struct FriedlandHaymanResult {
    std::vector<double> radii, beta_plus, beta_minus, sum, tolerance;
    Verdict verdict = Verdict::na;
    std::vector<std::string> notes;

    AuditReport audit() const {
        AuditReport a;
        a.name = "acf-friedland-hayman";
        a.add_series("r", radii).add_series("beta_sum", sum).add_series("tolerance", tolerance);
        a.tolerance = tolerance.empty() ? 0.0 : *std::max_element(tolerance.begin(), tolerance.end());
        a.verdict = verdict;
        a.notes = notes;
        return a;
    }
};

/// beta_+ + beta_- >= 2 - 8h/r on every audited circle.
inline FriedlandHaymanResult friedland_hayman_check(const ScalarField<2>& u, const Point<2>& z,
                                                    const std::vector<double>& radii) {
    FriedlandHaymanResult out;
    const double h = u.grid().h();
    bool ok = true;
    for (double r : radii) {
        CapCharacteristic p, q;
        try {
            p = cap_characteristic(u, z, r, +1);
            q = cap_characteristic(u, z, r, -1);
        } catch (const EmptyCap& e) {
            out.verdict = Verdict::na;
            out.notes.push_back(std::string("EmptyCap: ") + e.what());
            return out;
        }
        if (p.multi_arc || q.multi_arc)
            out.notes.push_back("multiple arcs at r = " + format_real(r, 6) + "; largest arc used");
        if (p.degenerate || q.degenerate) out.notes.push_back("tiny arc at r = " + format_real(r, 6));
        out.radii.push_back(r);
        out.beta_plus.push_back(p.beta);
        out.beta_minus.push_back(q.beta);
        out.sum.push_back(p.beta + q.beta);
        out.tolerance.push_back(8.0 * h / r);
        ok = ok && p.beta + q.beta >= 2.0 - 8.0 * h / r;
    }
    out.verdict = ok ? Verdict::pass : Verdict::fail;
    return out;
}

} // namespace jumpfb
