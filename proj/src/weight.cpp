#include "singflow/weight.hpp"

#include "singflow/fft.hpp"
#include "singflow/operators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace singflow {

Field discrete_log_laplacian(const TorusGrid& grid, const Field& rho) {
    return laplacian(grid, rho.log());
}

Field log_distance_source(const TorusGrid& grid, const CurveGamma& gamma, const DistanceField& dist) {
    if (gamma.kind() == CurveKind::axis_line) return Field::Zero(grid.size());
    const double R = gamma.radius();
    Field out(grid.size());
    for (Eigen::Index q = 0; q < grid.size(); ++q) {
        const double r = dist.rho[q];
        const double a = std::max(dist.axial_radius[q], dist.rho_min_clamp);
        out[q] = (dist.axial_radius[q] - R) / (a * r * r);
    }
    return out;
}

PoissonSolution solve_u(const PeriodicSolver& solver, const Field& rhs) {
    const TorusGrid& grid = solver.grid();
    PoissonSolution sol;
    sol.rhs_mean = grid.mean(rhs);
    sol.rhs_norm = std::sqrt(rhs.square().sum());
    sol.consistent = std::fabs(sol.rhs_mean) <= 1e-8 * std::max(sol.rhs_norm, std::numeric_limits<double>::min());
    const Field centered = rhs - sol.rhs_mean;
    sol.u = solver.solve_poisson(centered);
    sol.u -= grid.mean(sol.u);
    const double denom = std::sqrt(centered.square().sum());
    const Field res = -laplacian(grid, sol.u) - centered;
    sol.residual = denom > 0 ? std::sqrt(res.square().sum()) / denom : std::sqrt(res.square().sum());
    return sol;
}

WeightField assemble_weight(const TorusGrid& grid, const DistanceField& dist, const Field& u, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
    WeightField w;
    w.alpha = alpha;
    w.u = u;
    w.log_h = dist.rho.log() + u;
    w.h = w.log_h.exp();
    w.grad_log_h = gradient(grid, u);
    for (int a = 0; a < 3; ++a) w.grad_log_h.col(a) += dist.unit_gradient.col(a) / dist.rho;
    return w;
}

WeightField build_weight(const PeriodicSolver& solver, const CurveGamma& gamma, const DistanceField& dist,
                         double alpha, PoissonSolution* report) {
    const TorusGrid& grid = solver.grid();
    PoissonSolution sol = solve_u(solver, log_distance_source(grid, gamma, dist));
    WeightField w = assemble_weight(grid, dist, sol.u, alpha);
    if (report) *report = std::move(sol);
    return w;
}

double harmonicity_residual(const TorusGrid& grid, const WeightField& w, const DistanceField& dist,
                            double exclusion_radius, double outer_radius) {
    const Field lap = laplacian(grid, w.log_h).abs();
    Mask keep = dist.admissible(exclusion_radius);
    if (outer_radius > 0) keep = keep && (dist.raw <= outer_radius);
    double m = 0.0;
    for (Eigen::Index q = 0; q < grid.size(); ++q)
        if (keep[q]) m = std::max(m, lap[q]);
    return m;
}

RatioRange log_ratio_shell(const WeightField& w, const DistanceField& dist, double r0, double r1) {
    RatioRange r;
    r.min = std::numeric_limits<double>::infinity();
    r.max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index q = 0; q < w.log_h.size(); ++q) {
        if (dist.raw[q] < r0 || dist.raw[q] > r1) continue;
        const double v = w.log_h[q] / std::log(dist.rho[q]);
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
        ++r.count;
    }
    return r;
}

double gradient_bound(const TorusGrid& grid, const WeightField& w, const DistanceField& dist, double eps) {
    const Field g = gradient(grid, w.u).square().rowwise().sum().sqrt();
    const Mask keep = dist.admissible();
    double m = 0.0;
    for (Eigen::Index q = 0; q < grid.size(); ++q)
        if (keep[q]) m = std::max(m, std::pow(dist.rho[q], 1.0 - eps) * g[q]);
    return m;
}

}  // namespace singflow
