#include "singflow/fft.hpp"
#include "singflow/geometry.hpp"
#include "singflow/operators.hpp"
#include "singflow/weight.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace singflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Weight, PoissonSolveRecoversManufacturedSolution) {
    const TorusGrid grid(16, 2.0);
    const PeriodicSolver solver(grid);
    const Field u = grid.sample([](const Point& x) {
        return std::sin(kPi * x[0]) * std::cos(2 * kPi * x[1]) + 0.3 * std::cos(kPi * (x[1] + x[2]));
    });
    const PoissonSolution sol = solve_u(solver, -laplacian(grid, u));
    EXPECT_NEAR((sol.u - u).abs().maxCoeff(), 0.0, 1e-10);
    EXPECT_LT(sol.residual, 1e-10);
    EXPECT_TRUE(sol.consistent);
}

TEST(Weight, PoissonSolveReportsNonzeroMean) {
    const TorusGrid grid(8, 1.0);
    const PeriodicSolver solver(grid);
    const Field rhs = Field::Constant(grid.size(), 2.5) + grid.sample([](const Point& x) { return std::cos(2 * kPi * x[0]); });
    const PoissonSolution sol = solve_u(solver, rhs);
    EXPECT_NEAR(sol.rhs_mean, 2.5, 1e-12);
    EXPECT_FALSE(sol.consistent);
    EXPECT_NEAR(grid.mean(sol.u), 0.0, 1e-12);
    EXPECT_LT(sol.residual, 1e-10);
}

TEST(Weight, AxisLineWeightIsTheDistance) {
    const TorusGrid grid(16, 1.0);
    const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
    const DistanceField d = distance_to_curve(grid, g);
    const PeriodicSolver solver(grid);
    PoissonSolution rep;
    const WeightField w = build_weight(solver, g, d, 1.5, &rep);
    EXPECT_EQ(w.u.abs().maxCoeff(), 0.0);
    EXPECT_NEAR((w.h - d.rho).abs().maxCoeff(), 0.0, 1e-15);
    const RatioRange r = log_ratio_shell(w, d, 2 * grid.spacing(), 0.25);
    EXPECT_GT(r.count, 0);
    EXPECT_NEAR(r.min, 1.0, 1e-14);
    EXPECT_NEAR(r.max, 1.0, 1e-14);
}

TEST(Weight, CircleSourceMatchesLaplacianOfLogDistance) {
    const TorusGrid grid(16, 1.0);
    const CurveGamma g = CurveGamma::circle({0.5, 0.5, 0.5}, 0.25, 2, 1.0, 64);
    const DistanceField d = distance_to_curve(grid, g);
    const Field src = log_distance_source(grid, g, d);
    const double h = 1e-4;
    int checked = 0;
    for (Eigen::Index q = 0; q < grid.size(); ++q) {
        if (d.raw[q] < 0.08 || d.raw[q] > 0.2 || d.cut_locus()[q] || d.axial_radius[q] < 0.05) continue;
        const Point x = grid.node(q);
        double lap = -6.0 * std::log(g.distance(x));
        for (int a = 0; a < 3; ++a) {
            Point e = Point::Zero();
            e[a] = h;
            lap += std::log(g.distance(x + e)) + std::log(g.distance(x - e));
        }
        lap /= h * h;
        EXPECT_NEAR(src[q], lap, 1e-4 * std::fabs(lap) + 1e-4);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(Weight, HarmonicityResidualShrinksUnderRefinement) {
    double prev = INFINITY;
    for (int n : {16, 32}) {
        const TorusGrid grid(n, 1.0);
        const CurveGamma g = CurveGamma::axis_line(0.5, 0.5, 1.0);
        const DistanceField d = distance_to_curve(grid, g);
        const PeriodicSolver solver(grid);
        const WeightField w = build_weight(solver, g, d, 1.5);
        const double r = harmonicity_residual(grid, w, d, 0.125, 0.25);
        EXPECT_LT(r, prev / 3.0);
        prev = r;
    }
}

TEST(Weight, GradLogHCombinesDistanceAndCorrection) {
    const TorusGrid grid(16, 1.0);
    const CurveGamma g = CurveGamma::circle({0.5, 0.5, 0.5}, 0.2, 1, 1.0, 64);
    const DistanceField d = distance_to_curve(grid, g);
    const PeriodicSolver solver(grid);
    const WeightField w = build_weight(solver, g, d, 1.5);
    const VectorField gu = gradient(grid, w.u);
    for (Eigen::Index q = 0; q < grid.size(); q += 11)
        for (int a = 0; a < 3; ++a)
            EXPECT_NEAR(w.grad_log_h(q, a), gu(q, a) + d.unit_gradient(q, a) / d.rho[q], 1e-12);
}

TEST(Weight, RejectsAlphaAtMostOne) {
    const TorusGrid grid(8, 1.0);
    const DistanceField d = distance_to_curve(grid, CurveGamma::axis_line(0.5, 0.5, 1.0));
    EXPECT_THROW(assemble_weight(grid, d, Field::Zero(grid.size()), 1.0), std::invalid_argument);
}
