#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <jumpfb/freeboundary/classify.hpp>
#include <jumpfb/freeboundary/flux.hpp>
#include <jumpfb/freeboundary/level_set.hpp>
#include <jumpfb/freeboundary/lipschitz.hpp>
#include <jumpfb/freeboundary/measure.hpp>
#include <jumpfb/solver/picard.hpp>

using namespace jumpfb;

namespace {

constexpr double pi = std::numbers::pi;

TwoPhaseProblem<2> make2(const std::string& ap, const std::string& am, const std::string& bdry) {
    const double lam = 0.4;
    const auto a = parse_coefficient(ap, lam), b = parse_coefficient(am, lam);
    return {a, b, parse_boundary<2>(bdry, a(Point<2>{}), b(Point<2>{})), lam};
}

ScalarField<2> exact_two_plane(const Grid<2>& g) {
    return sample<2>(g, [](const Point<2>& x) { return x[0] > 0.0 ? 0.5 * x[0] : x[0]; });
}

const Solution<2>& solved_two_plane() {
    static const auto s = [] {
        const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
        const auto g = build_grid<2>(1.0, 128);
        return continuation_solve(p, g, default_eps_schedule(g.h()));
    }();
    return s;
}

} // namespace

TEST(ExtractLevelSet, Plane) {
    const auto g = build_grid<2>(1.0, 64);
    const auto u = sample<2>(g, [&](const Point<2>& x) { return x[0] + 1e-3 * g.h(); });
    const auto c = extract_level_set(u, 0.0);
    EXPECT_NEAR(c.measure(), 2.0, 0.02);
    for (const auto& v : c.vertices) EXPECT_NEAR(v[0], -1e-3 * g.h(), 1e-12);
}

TEST(ExtractLevelSet, PlaneThroughNodes) {
    const auto g = build_grid<2>(1.0, 64);
    const auto u = sample<2>(g, [](const Point<2>& x) { return x[0]; });
    EXPECT_NEAR(extract_level_set(u, 0.0).measure(), 2.0, 0.02);
}

TEST(ExtractLevelSet, Circle) {
    const auto g = build_grid<2>(1.0, 128);
    const auto u = sample<2>(g, [](const Point<2>& x) { return dot<2>(x, x) - 0.25; });
    EXPECT_NEAR(extract_level_set(u, 0.0).measure(), pi, 0.02 * pi);
}

TEST(ExtractLevelSet, ConstantIsEmpty) {
    const auto g = build_grid<2>(1.0, 32);
    const auto c = extract_level_set(ScalarField<2>(g, 1.0), 0.0);
    EXPECT_TRUE(c.empty());
    EXPECT_EQ(c.measure(), 0.0);
}

TEST(ExtractLevelSet, VerticesOnSignChangeEdges) {
    const auto g = build_grid<2>(1.0, 64);
    const auto u = sample<2>(g, [](const Point<2>& x) { return dot<2>(x, x) - 0.3; });
    const auto c = extract_level_set(u, 0.0);
    for (const auto& v : c.vertices) EXPECT_NEAR(interpolate(u, v), 0.0, 0.5 * g.h() * g.h());
    for (std::size_t e = 0; e < c.elements.size(); ++e) EXPECT_GT(c.element_measure(e), 1e-12 * g.h());
}

TEST(ExtractLevelSet, SphereArea3d) {
    const auto g = build_grid<3>(1.0, 48);
    const auto u = sample<3>(g, [](const Point<3>& x) { return dot<3>(x, x) - 0.25; });
    EXPECT_NEAR(extract_level_set(u, 0.0).measure(), pi, 0.03 * pi);
}

TEST(Perimeter, TwoPlaneDiameter) {
    const auto g = build_grid<2>(1.0, 128);
    EXPECT_NEAR(perimeter_diagnostic(exact_two_plane(g)), 2.0, 0.02);
}

TEST(Perimeter, EmptyIsZero) {
    const auto g = build_grid<2>(1.0, 32);
    EXPECT_EQ(perimeter_diagnostic(ScalarField<2>(g, -1.0)), 0.0);
}

TEST(Perimeter, TwoSided) {
    const auto g = build_grid<2>(1.0, 64);
    const auto u = sample<2>(g, [](const Point<2>& x) { return dot<2>(x, x) - 0.25; });
    EXPECT_EQ(two_sided_fraction(u, extract_level_set(u, 0.0)), 1.0);
}

TEST(BumpTest, Profile) {
    const BumpTest<2> b(Point<2>{0.1, 0.2}, 0.3);
    EXPECT_EQ(b(Point<2>{0.1, 0.2}), 1.0);
    EXPECT_EQ(b(Point<2>{0.5, 0.2}), 0.0);
    EXPECT_GE(b(Point<2>{0.2, 0.2}), 0.0);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += b(Point<2>{0.1 - 0.3 + 0.6 * (i + 0.5) / n, 0.2}) * 0.6 / n;
    EXPECT_NEAR(b.line_integral(), s, 1e-8);
    EXPECT_THROW(BumpTest<2>(Point<2>{0.9, 0.0}, 0.3).require_inside(build_grid<2>(1.0, 32)), PreconditionError);
}

TEST(MuPair, TwoPlaneSurfaceIntegral) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    const BumpTest<2> phi(Point<2>{0.0, 0.1}, 0.3);
    const double expected = phi.line_integral();
    EXPECT_NEAR(mu_pair(solved_two_plane().u, p, phi), expected, 0.03 * expected);
}

TEST(MuPair, BumpInsidePositivePhase) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    EXPECT_NEAR(mu_pair(solved_two_plane().u, p, BumpTest<2>(Point<2>{0.5, 0.0}, 0.3)), 0.0, 1e-8);
}

TEST(MuPair, ConstantIsZero) {
    const auto p = make2("constant(2)", "constant(1)", "zero()");
    EXPECT_EQ(mu_pair(ScalarField<2>(build_grid<2>(1.0, 32), 2.0), p, BumpTest<2>(Point<2>{}, 0.3)), 0.0);
}

TEST(MuAudit, SolvedTwoPlane) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    const auto& u = solved_two_plane().u;
    const auto bumps = bump_family(u, 16, 0.15, 1);
    ASSERT_EQ(bumps.size(), 16u);
    const auto r = mu_audit(u, p, bumps);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (double m : r.margin) EXPECT_GE(m, -1e-3);
    for (double d : r.defect) EXPECT_LE(d, 5e-3);
}

TEST(MuAudit, ZeroField) {
    const auto p = make2("constant(2)", "constant(1)", "zero()");
    const auto g = build_grid<2>(1.0, 32);
    std::vector<BumpTest<2>> bumps(10, BumpTest<2>(Point<2>{}, 0.3));
    const auto r = mu_audit(ScalarField<2>(g), p, bumps);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (double v : r.mu) EXPECT_EQ(v, 0.0);
}

TEST(BumpFamily, Deterministic) {
    const auto& u = solved_two_plane().u;
    const auto a = bump_family(u, 12, 0.15, 42), b = bump_family(u, 12, 0.15, 42), c = bump_family(u, 12, 0.15, 43);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].center, b[i].center);
        EXPECT_EQ(a[i].radius, b[i].radius);
    }
    EXPECT_NE(a[0].center, c[0].center);
}

TEST(FluxBalance, TwoPlaneBalanced) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    const BumpTest<2> eta(Point<2>{}, 0.5);
    const auto r = flux_balance(solved_two_plane().u, p, eta);
    const double expected = eta.line_integral();
    EXPECT_LE(r.mismatch, 0.02);
    EXPECT_NEAR(r.plus_limit, expected, 0.02 * expected);
    EXPECT_NEAR(r.minus_limit, expected, 0.02 * expected);
}

TEST(FluxBalance, AwayFromBoundaryIsZero) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    const auto r = flux_balance(solved_two_plane().u, p, BumpTest<2>(Point<2>{0.6, 0.0}, 0.2));
    for (double v : r.plus) EXPECT_EQ(v, 0.0);
    for (double v : r.minus) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.mismatch, 0.0);
}

TEST(FluxBalance, RejectsUnresolvedLevels) {
    const auto p = make2("constant(2)", "constant(1)", "twoplane(1, [1, 0])");
    EXPECT_THROW(flux_balance(solved_two_plane().u, p, BumpTest<2>(Point<2>{}, 0.5), {1e-5}), PreconditionError);
}

TEST(Classify, TwoPlaneNondegenerate) {
    const auto g = build_grid<2>(1.0, 128);
    const auto c = classify_point(exact_two_plane(g), Point<2>{}, dyadic_radii(0.8, g.h()));
    EXPECT_EQ(c.label, PointClass::nondegenerate);
    for (double q : c.q) EXPECT_NEAR(q, c.q.front(), 0.02 * c.q.front());
}

TEST(Classify, SaddleDegenerate) {
    const auto g = build_grid<2>(2.5, 640);
    const auto u = sample<2>(g, [](const Point<2>& x) { return x[0] * x[1]; });
    const auto c = classify_point(u, Point<2>{}, dyadic_radii(2.0, g.h()));
    EXPECT_EQ(c.label, PointClass::degenerate);
    for (std::size_t i = 1; i < c.q.size(); ++i) EXPECT_NEAR(c.q[i] / c.q[i - 1], 0.5, 0.02);
}

TEST(Classify, InteriorPointRejected) {
    const auto g = build_grid<2>(1.0, 64);
    EXPECT_THROW(classify_point(exact_two_plane(g), Point<2>{0.5, 0.0}, {0.25}), NotOnBoundary);
}

TEST(Lipschitz, TwoPlaneClosedForm) {
    // sup |grad P| = 1, |P|^2 on B_1 = (1/4 + 1) pi / 8
    const double norm_p = std::sqrt(1.25 * pi / 8.0);
    const double expected = std::pow(0.5, 2.0) / norm_p;
    for (int cells : {64, 128}) {
        const auto g = build_grid<2>(1.0, cells);
        const auto r = lipschitz_audit(exact_two_plane(g), 0.5);
        EXPECT_NEAR(r.ratio, expected, 0.02 * expected) << cells;
    }
}

TEST(Lipschitz, ZeroConvention) {
    const auto g = build_grid<2>(1.0, 32);
    EXPECT_EQ(lipschitz_audit(ScalarField<2>(g), 0.5).ratio, 0.0);
}

TEST(Lipschitz, RejectsThinMargin) {
    const auto g = build_grid<2>(1.0, 32);
    EXPECT_THROW(lipschitz_audit(ScalarField<2>(g, 1.0), 0.9), PreconditionError);
}

TEST(Lipschitz, ReportSpread) {
    EXPECT_EQ(lipschitz_report({0.1, 0.05}, {1.0, 1.05}).verdict, Verdict::pass);
    EXPECT_EQ(lipschitz_report({0.1, 0.05}, {1.0, 2.0}).verdict, Verdict::fail);
}
