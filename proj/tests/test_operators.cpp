#include "singflow/fft.hpp"
#include "singflow/operators.hpp"
#include "singflow/weight.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace singflow;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const TorusGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Field f(grid.size());
    for (auto& v : f) v = g(rng);
    return f;
}

Field mode(const TorusGrid& grid, int a, int b, int c) {
    return grid.sample([&](const Point& x) { return std::cos(2 * kPi * (a * x[0] + b * x[1] + c * x[2]) + 0.3); });
}

// Smooth positive weight with a closed-form log-gradient.
WeightField smooth_weight(const TorusGrid& grid, double alpha) {
    WeightField w;
    w.alpha = alpha;
    w.u = Field::Zero(grid.size());
    w.log_h = grid.sample([](const Point& x) { return 0.2 * std::sin(2 * kPi * x[0]) + 0.1 * std::cos(2 * kPi * x[2]); });
    w.h = w.log_h.exp();
    w.grad_log_h.resize(grid.size(), 3);
    for (Eigen::Index q = 0; q < grid.size(); ++q) {
        const Point x = grid.node(q);
        w.grad_log_h.row(q) << 0.4 * kPi * std::cos(2 * kPi * x[0]), 0.0, -0.2 * kPi * std::sin(2 * kPi * x[2]);
    }
    return w;
}

}  // namespace

TEST(Operators, LaplacianActsOnFourierModesByTheSymbol) {
    const TorusGrid grid(16, 1.0);
    const PeriodicSolver solver(grid);
    for (auto [a, b, c] : {std::array{1, 0, 0}, {2, -1, 3}, {0, 5, 1}}) {
        const Field f = mode(grid, a, b, c);
        const double s = grid.spacing();
        const double lam = 4.0 / (s * s) *
                           (std::pow(std::sin(kPi * a / 16), 2) + std::pow(std::sin(kPi * b / 16), 2) +
                            std::pow(std::sin(kPi * c / 16), 2));
        EXPECT_NEAR((laplacian(grid, f) + lam * f).abs().maxCoeff(), 0.0, 1e-9 * lam);
        EXPECT_NEAR(discrete_symbol(grid, a, b, c), lam, 1e-9 * lam);
    }
}

TEST(Operators, FaceGradientIsMinusAdjointOfFaceDivergence) {
    const TorusGrid grid(8, 1.3);
    const Field f = random_field(grid, 1);
    VectorField v(grid.size(), 3);
    v.col(0) = random_field(grid, 2);
    v.col(1) = random_field(grid, 3);
    v.col(2) = random_field(grid, 4);
    const double lhs = grid.inner(face_gradient(grid, f), v);
    const double rhs = -grid.inner(f, face_divergence(grid, v));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::fabs(lhs));
}

TEST(Operators, WeightedDivergenceIsSymmetricAndReducesToLaplacian) {
    const TorusGrid grid(8, 1.0);
    const Field lw = 0.5 * random_field(grid, 5);
    const Field f = random_field(grid, 6), g = random_field(grid, 7);
    EXPECT_NEAR(grid.inner(weighted_divergence(grid, lw, f), g), grid.inner(f, weighted_divergence(grid, lw, g)), 1e-9);
    const Field zero = Field::Zero(grid.size());
    EXPECT_NEAR((weighted_divergence(grid, zero, f) - laplacian(grid, f)).abs().maxCoeff(), 0.0, 1e-9);
}

TEST(Operators, CenteredGradientOfTrigIsSecondOrder) {
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const TorusGrid grid(n, 1.0);
        const Field f = grid.sample([](const Point& x) { return std::sin(2 * kPi * x[1]); });
        const Field exact = grid.sample([](const Point& x) { return 2 * kPi * std::cos(2 * kPi * x[1]); });
        const double err = (gradient(grid, f).col(1) - exact).abs().maxCoeff();
        if (prev > 0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.05);
        prev = err;
    }
}

TEST(Operators, ConservativeAndExpandedResidualsAgreeToSecondOrder) {
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const TorusGrid grid(n, 1.0);
        const WeightField w = smooth_weight(grid, 1.5);
        const Field phi1 = grid.sample([](const Point& x) { return std::sin(2 * kPi * x[0]) * std::cos(2 * kPi * x[1]); });
        const Field phi2 = grid.sample([](const Point& x) { return 0.3 * std::cos(2 * kPi * x[2]); });
        const Field zero = Field::Zero(grid.size());
        const FieldPair a = P_residual(grid, phi1, phi2, zero, zero, w);
        const FieldPair b = P_residual_conservative(grid, phi1, phi2, zero, zero, w);
        EXPECT_NEAR((a.second - b.second).abs().maxCoeff(), 0.0, 1e-9);
        const double err = (a.first - b.first).abs().maxCoeff();
        if (prev > 0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.2);
        prev = err;
    }
}

TEST(Operators, LinearizationMatchesDifferenceQuotient) {
    const TorusGrid grid(16, 1.0);
    const WeightField w = smooth_weight(grid, 1.5);
    const Field phi1 = grid.sample([](const Point& x) { return std::sin(2 * kPi * x[0]); });
    const Field phi2 = grid.sample([](const Point& x) { return 0.2 * std::cos(2 * kPi * x[1]); });
    const Field k1 = mode(grid, 1, 1, 0), k2 = mode(grid, 0, 1, 2);
    const Field zero = Field::Zero(grid.size());
    const FieldPair p0 = P_residual(grid, phi1, phi2, zero, zero, w);
    const FieldPair dp = DP_apply(grid, phi1, phi2, k1, k2, w);
    double errs[3];
    int i = 0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const FieldPair pe = P_residual(grid, phi1 + eps * k1, phi2 + eps * k2, zero, zero, w);
        errs[i++] = std::max(((pe.first - p0.first) / eps - dp.first).abs().maxCoeff(),
                             ((pe.second - p0.second) / eps - dp.second).abs().maxCoeff());
    }
    EXPECT_NEAR(std::log10(errs[0] / errs[1]), 1.0, 0.1);
    EXPECT_NEAR(std::log10(errs[1] / errs[2]), 1.0, 0.1);
}

TEST(Operators, LinearizationIsLinearAndIncludesTimeDerivatives) {
    const TorusGrid grid(8, 1.0);
    const WeightField w = smooth_weight(grid, 2.0);
    const Field phi1 = random_field(grid, 8) * 0.1, phi2 = random_field(grid, 9) * 0.1;
    const Field a1 = random_field(grid, 10), a2 = random_field(grid, 11);
    const Field b1 = random_field(grid, 12), b2 = random_field(grid, 13);
    const FieldPair pa = DP_apply(grid, phi1, phi2, a1, a2, w);
    const FieldPair pb = DP_apply(grid, phi1, phi2, b1, b2, w);
    const FieldPair pab = DP_apply(grid, phi1, phi2, 2 * a1 - b1, 2 * a2 - b2, w);
    EXPECT_NEAR((pab.first - 2 * pa.first + pb.first).abs().maxCoeff(), 0.0, 1e-8);
    EXPECT_NEAR((pab.second - 2 * pa.second + pb.second).abs().maxCoeff(), 0.0, 1e-8);
    const FieldPair pt = DP_apply(grid, phi1, phi2, a1, a2, w, b1, b2);
    EXPECT_NEAR((pt.first - pa.first - b1).abs().maxCoeff(), 0.0, 1e-12);
    EXPECT_NEAR((pt.second - pa.second - b2).abs().maxCoeff(), 0.0, 1e-12);
}

TEST(Operators, ZeroMapHasZeroResidual) {
    const TorusGrid grid(8, 1.0);
    const WeightField w = smooth_weight(grid, 1.5);
    const Field zero = Field::Zero(grid.size());
    const FieldPair p = P_residual(grid, zero, zero, zero, zero, w);
    EXPECT_EQ(p.first.abs().maxCoeff(), 0.0);
    EXPECT_EQ(p.second.abs().maxCoeff(), 0.0);
}
