#pragma once

#include "singflow/geometry.hpp"
#include "singflow/grid.hpp"

namespace singflow {

class PeriodicSolver;

struct WeightField {
    Field u;
    Field h;
    Field log_h;
    VectorField grad_log_h;
    double alpha = 1.5;
};

struct PoissonSolution {
    Field u;
    double rhs_mean = 0.0;   // removed before solving
    double rhs_norm = 0.0;   // grid 2-norm of the raw right-hand side
    double residual = 0.0;   // ||-lap u - (rhs - mean)|| / ||rhs - mean||
    bool consistent = true;  // |rhs_mean| <= 1e-8 ||rhs||
};

// Discrete laplacian of log rho.
Field discrete_log_laplacian(const TorusGrid& grid, const Field& rho);

// Pointwise value of lap log rho off the curve, taken on the nearest periodic branch.
// Zero for a straight line; (q - R) / (q rho^2) for a circle, q the distance to its axis.
Field log_distance_source(const TorusGrid& grid, const CurveGamma& gamma, const DistanceField& dist);

// -lap u = rhs with the mean of rhs projected out and a zero-mean gauge for u.
PoissonSolution solve_u(const PeriodicSolver& solver, const Field& rhs);

WeightField assemble_weight(const TorusGrid& grid, const DistanceField& dist, const Field& u, double alpha);

// Source, solve and assembly in one call.
WeightField build_weight(const PeriodicSolver& solver, const CurveGamma& gamma, const DistanceField& dist,
                         double alpha, PoissonSolution* report = nullptr);

// max |lap log h| over admissible nodes with exclusion_radius <= rho <= outer_radius.
double harmonicity_residual(const TorusGrid& grid, const WeightField& w, const DistanceField& dist,
                            double exclusion_radius, double outer_radius = -1.0);

struct RatioRange {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};
// log h / log rho over nodes with rho in [r0, r1].
RatioRange log_ratio_shell(const WeightField& w, const DistanceField& dist, double r0, double r1);

// max rho^{1-eps} |grad u| over admissible nodes.
double gradient_bound(const TorusGrid& grid, const WeightField& w, const DistanceField& dist, double eps);

}  // namespace singflow
