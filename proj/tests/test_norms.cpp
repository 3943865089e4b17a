#include "singflow/fft.hpp"
#include "singflow/flow.hpp"
#include "singflow/norms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace singflow;

namespace {

constexpr double kPi = std::numbers::pi;

// Upper half-plane distance from the closed form.
double hyp_closed(double x, double y, double x0, double y0) {
    return std::acosh(1.0 + ((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (2.0 * y * y0));
}

}  // namespace

TEST(Norms, HyperbolicDistanceMatchesClosedForm) {
    Field a(4), b(4), a0(4), b0(4);
    a << 0.0, 1.0, -2.0, 3.0;
    b << 2.0, 1.0, 0.5, 1e-3;
    a0 << 0.0, 0.0, 1.0, 3.0;
    b0 << 1.0, 1.0, 2.0, 1e-3;
    const Field d = hyperbolic_distance(a, b, a0, b0);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(d[i], hyp_closed(a[i], b[i], a0[i], b0[i]), 1e-12 * (1 + d[i]));
    EXPECT_NEAR(d[0], std::log(2.0), 1e-14);
    EXPECT_EQ(d[3], 0.0);
}

TEST(Norms, HyperbolicDistanceIsSymmetricAndScaleInvariant) {
    Field a(1), b(1), a0(1), b0(1);
    a << 0.4;
    b << 0.7;
    a0 << -0.2;
    b0 << 1.9;
    const double d = hyperbolic_distance(a, b, a0, b0)[0];
    EXPECT_NEAR(d, hyperbolic_distance(a0, b0, a, b)[0], 1e-14);
    EXPECT_NEAR(d, hyperbolic_distance(5 * a + 1, 5 * b, 5 * a0 + 1, 5 * b0)[0], 1e-13);
    // Far from the boundary, where a naive formula would overflow.
    Field la(1), la0(1);
    la << -700.0;
    la0 << -701.0;
    EXPECT_NEAR(hyperbolic_distance_log(Field::Zero(1), la, Field::Zero(1), la0)[0], 1.0, 1e-12);
}

TEST(Norms, L2NormOfConstantAndScaledField) {
    const TorusGrid grid(8, 2.0);
    EXPECT_NEAR(l2_norm(grid, Field::Constant(grid.size(), 3.0)), 3.0 * std::sqrt(8.0), 1e-12);
    const Field f = grid.sample([](const Point& x) { return std::sin(kPi * x[0]); });
    EXPECT_NEAR(l2_norm(grid, 1e-200 * f) / 1e-200, l2_norm(grid, f), 1e-12);
    EXPECT_NEAR(l2_norm(grid, f), 2.0, 1e-12);  // mean of sin^2 is 1/2 over a volume of 8
}

TEST(Norms, EnergyOfEigenmodeIsEigenvalueTimesMass) {
    const TorusGrid grid(12, 1.0);
    const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
    const DistanceField d = distance_to_curve(grid, g);
    const PeriodicSolver solver(grid);
    const WeightField w = build_weight(solver, g, d, 1.5);
    const FlowSolver flow(grid, d, w, solver);
    const Field phi2 = grid.sample([](const Point& x) { return 0.1 * std::cos(2 * kPi * (x[1] - x[2])); });
    const FlowState s = flow.init_state(Field::Zero(grid.size()), phi2);
    EXPECT_NEAR(energy_H(grid, s, w), discrete_symbol(grid, 0, 1, -1) * grid.inner(phi2, phi2), 1e-12);
}

TEST(Norms, CStarNormVanishesOnlyAtZeroAndScales) {
    const TorusGrid grid(16, 1.0);
    const DistanceField d = distance_to_curve(grid, CurveGamma::axis_line(0.5, 0.5, 1.0));
    const Field zero = Field::Zero(grid.size());
    EXPECT_EQ(cstar2_norm(grid, zero, zero, d, 1.5), 0.0);
    const Field f = grid.sample([](const Point& x) { return std::sin(2 * kPi * x[0]); });
    const double n1 = cstar2_norm(grid, f, zero, d, 1.5);
    EXPECT_GT(n1, 0.0);
    EXPECT_NEAR(cstar2_norm(grid, -3.0 * f, zero, d, 1.5), 3.0 * n1, 1e-12 * n1);
    // A constant has no derivatives; only the k = 0 term with the largest admissible rho^{3/2} survives.
    const double c = cstar2_norm(grid, zero, Field::Constant(grid.size(), 2.0), d, 1.5);
    double rmax = 0.0;
    for (Eigen::Index q = 0; q < grid.size(); ++q)
        if (d.raw[q] >= 2 * d.spacing) rmax = std::max(rmax, d.rho[q]);
    EXPECT_NEAR(c, 2.0 * std::pow(rmax, 1.5), 1e-12);
}

TEST(Norms, ParabolicDistanceTakesTheLargerPart) {
    EXPECT_DOUBLE_EQ(parabolic_distance({0, 0, 0}, 0.0, {0.3, 0, 0}, 0.01, 1.0), 0.3);
    EXPECT_DOUBLE_EQ(parabolic_distance({0, 0, 0}, 0.0, {0.1, 0, 0}, 0.25, 1.0), 0.5);
    EXPECT_NEAR(parabolic_distance({0.05, 0, 0}, 1.0, {0.95, 0, 0}, 1.0, 1.0), 0.1, 1e-15);
}

TEST(Norms, LocalEnergyOfConstantGradientScalesWithVolume) {
    const TorusGrid grid(32, 1.0);
    const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
    const DistanceField d = distance_to_curve(grid, g);
    const PeriodicSolver solver(grid);
    const WeightField w = build_weight(solver, g, d, 1.5);
    const FlowSolver flow(grid, d, w, solver);
    const Field phi2 = grid.sample([](const Point& x) { return 0.05 * std::sin(2 * kPi * x[0]); });
    const FlowState s = flow.init_state(Field::Zero(grid.size()), phi2);
    const Point x(0.1, 0.1, 0.3);
    const LocalEnergy big = local_energy_E(grid, s, w, x, 0.1);
    const LocalEnergy small = local_energy_E(grid, s, w, x, 0.05);
    EXPECT_GT(big.f, 0.0);
    EXPECT_GE(big.E, big.f);
    // The integrand is nearly constant on these balls: the integral grows like sigma^3, f like sigma^2.
    EXPECT_NEAR(big.f / small.f, 4.0, 0.4);
}

TEST(Norms, SampledSeminormIsDeterministicAndZeroForConstants) {
    const TorusGrid grid(16, 1.0);
    const DistanceField d = distance_to_curve(grid, CurveGamma::axis_line(0.5, 0.5, 1.0));
    SpaceTimeSamples u;
    u.times = {0.0, 0.5, 1.0};
    const Field f = grid.sample([](const Point& x) { return std::cos(2 * kPi * x[2]); });
    u.values = {f, 0.5 * f, 0.25 * f};
    const auto a = weighted_space_norms(grid, u, d, 1.5, 2.5, 0.5, 2000, 7);
    const auto b = weighted_space_norms(grid, u, d, 1.5, 2.5, 0.5, 2000, 7);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
    EXPECT_GT(a[2].value, 0.0);
    u.values = {Field::Constant(grid.size(), 1.0), Field::Constant(grid.size(), 1.0), Field::Constant(grid.size(), 1.0)};
    const auto c = weighted_space_norms(grid, u, d, 1.5, 2.5, 0.5, 2000, 7);
    EXPECT_EQ(c[2].value, 0.0);
    EXPECT_GT(c[0].value, 0.0);
}
