#include "singflow/analysis.hpp"
#include "singflow/fft.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace singflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
    return t;
}

}  // namespace

TEST(Analysis, FitRecoversExactExponential) {
    const auto t = linspace(0.0, 5.0, 51);
    std::vector<double> y;
    for (double s : t) y.push_back(3.0 * std::exp(-2.0 * s));
    const DecayReport r = fit_decay_rate(t, y, 1.0, 4.0);
    EXPECT_NEAR(r.rate, 2.0, 1e-12);
    EXPECT_NEAR(r.amplitude, 3.0, 1e-10);
    EXPECT_NEAR(r.r2, 1.0, 1e-12);
    EXPECT_EQ(r.samples, 31);
}

TEST(Analysis, FitMatchesHandComputedRegression) {
    // A zig-zag around a line of slope -0.5.
    std::vector<double> t, ly;
    for (int i = 0; i < 12; ++i) {
        t.push_back(i);
        ly.push_back(i % 2 == 0 ? -0.5 * i : -0.5 * i + 1.0);
    }
    const DecayReport r = fit_log_decay_rate(t, ly, 0.0, 11.0);
    // Closed-form least squares slope.
    double mx = 5.5, my = 0, sxx = 0, sxy = 0;
    for (double v : ly) my += v / 12;
    for (int i = 0; i < 12; ++i) {
        sxx += (t[i] - mx) * (t[i] - mx);
        sxy += (t[i] - mx) * (ly[i] - my);
    }
    EXPECT_NEAR(r.rate, -sxy / sxx, 1e-12);
    EXPECT_LT(r.r2, 1.0);
    EXPECT_GT(r.r2, 0.9);
}

TEST(Analysis, FitRejectsShortOrNonPositiveWindows) {
    const auto t = linspace(0.0, 1.0, 20);
    std::vector<double> y(20, 1.0);
    EXPECT_THROW(fit_decay_rate(t, y, 0.0, 0.3), std::invalid_argument);
    y[10] = 0.0;
    EXPECT_THROW(fit_decay_rate(t, y, 0.0, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(fit_decay_rate(t, y, 0.0, 0.5));
}

TEST(Analysis, FirstEigenvalueIsTheDiscreteSymbol) {
    const TorusGrid grid(32, 1.0);
    const double s = grid.spacing();
    EXPECT_NEAR(first_eigenvalue(grid), 4.0 / (s * s) * std::pow(std::sin(kPi / 32), 2), 1e-10);
    EXPECT_NEAR(first_eigenvalue(grid), 39.3517, 1e-4);
    EXPECT_NEAR(first_eigenvalue(TorusGrid(256, 1.0)), 4 * kPi * kPi, 0.01);
}

TEST(Analysis, BoundReportUsesTolerance) {
    EXPECT_TRUE(make_bound("a", 1.0, 1.0, 0.0).pass);
    EXPECT_TRUE(make_bound("a", 1.0005, 1.0, 1e-3).pass);
    EXPECT_FALSE(make_bound("a", 1.1, 1.0, 1e-3).pass);
    EXPECT_FALSE(make_bound("a", NAN, 1.0, 1.0).pass);
    EXPECT_DOUBLE_EQ(make_bound("a", 0.25, 1.0, 0.0).margin, 0.75);
}

TEST(Analysis, MaxPrincipleBoundFromTension) {
    Trajectory tr;
    tr.tension_max = 2.0;
    tr.max_hyp_distance = 0.2;
    tr.sup_abs_phi2_init = 0.3;
    tr.max_abs_phi2 = 0.55;
    const MaxPrincipleReport r = check_max_principle(tr, 1.0);
    EXPECT_NEAR(r.bound, 2.0 * 0.75 / 6.0, 1e-15);
    EXPECT_TRUE(r.distance.pass);
    EXPECT_TRUE(r.phi2.pass);
    tr.max_abs_phi2 = 0.3 + 0.25 + 2e-3;
    EXPECT_FALSE(check_max_principle(tr, 1.0).phi2.pass);
}

TEST(Analysis, BochnerViolationVanishesForExactHeatSolution) {
    const TorusGrid grid(16, 1.0);
    const double lam = discrete_symbol(grid, 1, 0, 1);
    const Field mode = grid.sample([](const Point& x) { return std::cos(2 * kPi * (x[0] + x[2])); });
    const double dt = 1e-4;
    auto th = [&](double t) { return Field(2.0 + std::exp(-lam * t) * mode); };
    const Mask all = Mask::Constant(grid.size(), true);
    double scale = 0;
    const double v = bochner_violation(grid, th(0), th(dt), th(2 * dt), dt, all, &scale);
    EXPECT_GT(scale, 1.0);
    // Central differencing of exp(-lam t) has relative error (lam dt)^2 / 6.
    EXPECT_LT(v, scale * std::pow(lam * dt, 2));
    // Heating instead of cooling is a violation of order lam.
    auto warm = [&](double t) { return Field(2.0 + std::exp(lam * t) * mode); };
    EXPECT_GT(bochner_violation(grid, warm(0), warm(dt), warm(2 * dt), dt, all), lam);
}

TEST(Analysis, ThetaDecayOnSyntheticSeries) {
    Trajectory tr;
    for (int i = 0; i <= 50; ++i) {
        const double t = 0.1 * i;
        tr.diagnostics.push_back({t, std::log(5.0) - 80.0 * t, 0.5 * std::exp(-20.0 * t), 0.0, 0.0, 0.0});
    }
    const ThetaDecay d = theta_decay_check(tr, 39.3517, 1.0, 5.0);
    EXPECT_NEAR(d.integral.rate, 80.0, 1e-9);
    EXPECT_NEAR(d.pointwise.rate, 20.0, 1e-9);
    EXPECT_TRUE(d.integral.pass);
    EXPECT_TRUE(d.pointwise.pass);
    const ThetaDecay slow = theta_decay_check(tr, 100.0, 1.0, 5.0);
    EXPECT_FALSE(slow.integral.pass);
}

TEST(Analysis, ExponentFitRecoversPower) {
    const TorusGrid grid(32, 1.0);
    const DistanceField d = distance_to_curve(grid, CurveGamma::axis_line(0.5, 0.5, 1.0));
    const Field f = d.rho.pow(3.0) * 0.7;
    const ExponentFit e = exponent_fit(f, d, 2 * grid.spacing(), 0.25);
    EXPECT_NEAR(e.slope, 3.0, 1e-10);
    EXPECT_THROW(exponent_fit(f, d, 0.0, 0.25), std::invalid_argument);
}

TEST(Analysis, BarrierConstantOfPurePower) {
    const TorusGrid grid(16, 1.0);
    const DistanceField d = distance_to_curve(grid, CurveGamma::axis_line(0.5, 0.5, 1.0));
    const Field u = d.rho.pow(2.5);
    const Field r = Field::Zero(grid.size());
    const BoundReport b = barrier_check(u, d.rho, r, 2.5, 0.5, d.admissible(), 1.0);
    EXPECT_NEAR(b.lhs, 1.0, 1e-12);
    EXPECT_TRUE(b.pass);
}

TEST(Analysis, CentersLieOnTheCurve) {
    const TorusGrid grid(16, 1.0);
    const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
    const DistanceField d = distance_to_curve(grid, g);
    const auto c = curve_adjacent_centers(grid, g, d, 8);
    ASSERT_EQ(c.size(), 8u);
    for (const auto& p : c) EXPECT_NEAR(g.distance(p), 0.0, 1e-12);
}

TEST(Analysis, RegularityScanOfSmoothStateHasPositiveSlope) {
    const TorusGrid grid(32, 1.0);
    const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
    const DistanceField d = distance_to_curve(grid, g);
    const PeriodicSolver solver(grid);
    const WeightField w = build_weight(solver, g, d, 1.5);
    const FlowSolver flow(grid, d, w, solver);
    const FlowState s = flow.init_state(InitialFamily::poly_cutoff_trig, {});
    const auto rows = epsilon_regularity_scan(grid, s, w, {Point(0.5, 0.5, 0.25)}, {0.125, 0.0625, 0.03125, 0.015625});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GT(rows[0].slope, 0.0);
    EXPECT_GT(rows[0].sigma_small, 0.0);
}
