#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include <jumpfb/field/calculus.hpp>
#include <jumpfb/field/coefficient.hpp>
#include <jumpfb/field/io.hpp>
#include <jumpfb/field/quadrature.hpp>

using namespace jumpfb;

TEST(BuildGrid, Square64) {
    const auto g = build_grid<2>(1.0, 64);
    EXPECT_DOUBLE_EQ(g.h(), 0.03125);
    EXPECT_EQ(g.nodes_per_side(), 65);
    EXPECT_EQ(g.size(), 65u * 65u);
}

TEST(BuildGrid, Cube32) {
    const auto g = build_grid<3>(1.0, 32);
    EXPECT_DOUBLE_EQ(g.h(), 0.0625);
    EXPECT_EQ(g.size(), 33u * 33u * 33u);
}

TEST(BuildGrid, RejectsOddAndTiny) {
    EXPECT_THROW(build_grid<2>(1.0, 15), PreconditionError);
    EXPECT_THROW(build_grid<2>(1.0, 17), PreconditionError);
    EXPECT_THROW(build_grid<2>(1.0, 8), PreconditionError);
}

TEST(BuildGrid, NodesAreIntegerMultiplesOfH) {
    const auto g = build_grid<2>(1.0, 32);
    const auto o = g.point(g.nearest(Point<2>{0.0, 0.0}));
    EXPECT_EQ(o[0], 0.0);
    EXPECT_EQ(o[1], 0.0);
    g.for_each_node([&](const Index<2>& k, std::size_t i) {
        EXPECT_EQ(g.ravel(k), i);
        const auto x = g.point(k);
        for (int d = 0; d < 2; ++d) EXPECT_DOUBLE_EQ(x[d], (k[d] - 16) * g.h());
    });
}

TEST(SampleCoefficient, ConstantIsConstant) {
    const auto g = build_grid<2>(1.0, 16);
    const auto a = sample_coefficient(parse_coefficient("constant(2.0)", 0.4), g);
    for (double v : a.values()) EXPECT_EQ(v, 2.0);
}

TEST(SampleCoefficient, HoelderFormula) {
    const auto m = parse_coefficient("hoelder(1.0, 0.5, [0, 0], 0.5)", 0.4);
    EXPECT_NEAR(m(Point<2>{0.25, 0.0}), 1.25, 1e-15);
    const auto g = build_grid<2>(1.0, 16);
    const auto a = sample_coefficient(m, g);
    EXPECT_NEAR(a.at(g.nearest(Point<2>{0.25, 0.0})), 1.25, 1e-15);
}

TEST(SampleCoefficient, RejectsOutOfRange) {
    const auto g = build_grid<2>(1.0, 16);
    EXPECT_THROW(sample_coefficient(parse_coefficient("constant(0.1)", 0.5), g), PreconditionError);
    EXPECT_THROW(sample_coefficient(parse_coefficient("constant(3)", 0.5), g), PreconditionError);
}

TEST(SampleCoefficient, HoelderBoundHolds) {
    const auto m = parse_coefficient("hoelder(1.5, 0.3, [0.1, -0.2], 0.5)", 0.4);
    const auto w = m.modulus(2);
    const Point<2> pts[] = {{0.1, -0.2}, {0.5, 0.5}, {-0.7, 0.2}, {0.9, -0.9}, {0.11, -0.21}};
    for (const auto& x : pts)
        for (const auto& y : pts) EXPECT_LE(std::abs(m(x) - m(y)), w(norm<2>(x - y)) + 1e-14);
    EXPECT_NEAR(w.dini_integral(), w.amplitude / w.exponent, 1e-15);
}

TEST(ParseCoefficient, Errors) {
    EXPECT_THROW(parse_coefficient("nonsense(1)", 0.4), ConfigError);
    EXPECT_THROW(parse_coefficient("constant(1, 2)", 0.4), ConfigError);
    EXPECT_THROW(parse_coefficient("constant(", 0.4), ConfigError);
}

TEST(Gradient, AffineExact) {
    const auto g = build_grid<2>(1.0, 32);
    const auto u = sample<2>(g, [](const Point<2>& x) { return 3.0 * x[0] - 0.5 * x[1] + 2.0; });
    const auto gr = gradient_field(u);
    for (const auto& v : gr) {
        EXPECT_NEAR(v[0], 3.0, 1e-12);
        EXPECT_NEAR(v[1], -0.5, 1e-12);
    }
}

TEST(Gradient, SquareSymmetricAtOrigin) {
    const auto g = build_grid<2>(1.0, 32);
    const auto u = sample<2>(g, [](const Point<2>& x) { return x[0] * x[0]; });
    const auto v = gradient_field(u)[g.ravel(g.nearest(Point<2>{0, 0}))];
    EXPECT_EQ(v[0], 0.0);
    EXPECT_EQ(v[1], 0.0);
}

TEST(Gradient, BilinearAtDiagonalNode) {
    const auto g = build_grid<2>(1.0, 32);
    const double h = g.h();
    const auto u = sample<2>(g, [](const Point<2>& x) { return x[0] * x[1]; });
    const auto v = gradient_field(u)[g.ravel(g.nearest(Point<2>{h, h}))];
    EXPECT_NEAR(v[0], h, 1e-15);
    EXPECT_NEAR(v[1], h, 1e-15);
}

TEST(Gradient, AffineExact3d) {
    const auto g = build_grid<3>(1.0, 16);
    const auto u = sample<3>(g, [](const Point<3>& x) { return x[0] + 2.0 * x[1] - x[2]; });
    for (const auto& v : gradient_field(u)) {
        EXPECT_NEAR(v[0], 1.0, 1e-12);
        EXPECT_NEAR(v[1], 2.0, 1e-12);
        EXPECT_NEAR(v[2], -1.0, 1e-12);
    }
}

TEST(L2BallNorm, UnitField) {
    const auto g = build_grid<2>(1.0, 128);
    const ScalarField<2> one(g, 1.0);
    const double exact = std::sqrt(std::numbers::pi * 0.25);
    EXPECT_NEAR(l2_ball_norm(one, Point<2>{}, 0.5), exact, 0.02 * exact);
}

TEST(L2BallNorm, ZeroField) {
    const auto g = build_grid<2>(1.0, 64);
    EXPECT_EQ(l2_ball_norm(ScalarField<2>(g), Point<2>{}, 0.5), 0.0);
}

TEST(L2BallNorm, LinearField) {
    const auto g = build_grid<2>(1.0, 128);
    const auto u = sample<2>(g, [](const Point<2>& x) { return x[0]; });
    const double exact = std::sqrt(std::numbers::pi * std::pow(0.5, 4) / 4.0);
    EXPECT_NEAR(l2_ball_norm(u, Point<2>{}, 0.5), exact, 0.02 * exact);
}

TEST(L2BallNorm, RejectsBallLeavingBox) {
    const auto g = build_grid<2>(1.0, 64);
    EXPECT_THROW(l2_ball_norm(ScalarField<2>(g, 1.0), Point<2>{0.8, 0.0}, 0.5), PreconditionError);
}

TEST(L2BallNorm, UnitBall3d) {
    const auto g = build_grid<3>(1.0, 32);
    const double exact = std::sqrt(4.0 / 3.0 * std::numbers::pi * 0.125);
    EXPECT_NEAR(l2_ball_norm(ScalarField<3>(g, 1.0), Point<3>{}, 0.5), exact, 0.02 * exact);
}

TEST(L2BallNorm, ScalingCovariance) {
    // v(y) = u(s y) on a grid of radius 1/s; |v|_{B_{r/s}} s^{n/2} = |u|_{B_r}
    const double s = 2.0;
    const auto gu = build_grid<2>(1.0, 128), gv = build_grid<2>(1.0 / s, 128);
    const auto f = [](const Point<2>& x) { return std::sin(2.0 * x[0]) + x[1] * x[1]; };
    const auto u = sample<2>(gu, f);
    const auto v = sample<2>(gv, [&](const Point<2>& y) { return f(s * y); });
    const double a = l2_ball_norm(u, Point<2>{0.1, 0.0}, 0.6);
    const double b = l2_ball_norm(v, Point<2>{0.1 / s, 0.0}, 0.6 / s) * s;
    EXPECT_NEAR(a, b, 0.02 * a);
}

TEST(GridDump, RoundTrip) {
    const auto g = build_grid<2>(1.0, 16);
    const auto u = sample<2>(g, [](const Point<2>& x) { return std::exp(x[0]) * std::cos(3.0 * x[1]); });
    std::stringstream ss;
    write_grid_dump(ss, u);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "2 0.125 1 16");
    ss.seekg(0);
    const auto v = read_grid_dump<2>(ss);
    EXPECT_EQ(max_abs_difference(u, v), 0.0);
}

TEST(GridDump, RejectsTruncated) {
    std::stringstream ss("2 0.125 1 16\n1.0\n2.0\n");
    EXPECT_THROW(read_grid_dump<2>(ss), PreconditionError);
}

TEST(Interpolate, BilinearExact) {
    const auto g = build_grid<2>(1.0, 16);
    const auto f = [](const Point<2>& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1]; };
    const auto u = sample<2>(g, f);
    for (const Point<2> x : {Point<2>{0.013, -0.77}, Point<2>{0.5, 0.5}, Point<2>{-0.99, 0.31}})
        EXPECT_NEAR(interpolate(u, x), f(x), 1e-13);
}
