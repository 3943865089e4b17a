#pragma once

#include "singflow/flow.hpp"
#include "singflow/norms.hpp"

#include <limits>
#include <string>
#include <vector>

namespace singflow {

struct DecayReport {
    std::string quantity;
    double amplitude = 0.0;
    double rate = 0.0;
    double t0 = 0.0, t1 = 0.0;
    double r2 = 0.0;
    double reference_rate = 0.0;
    int samples = 0;
    bool pass = false;
    std::string verdict;
};

struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

BoundReport make_bound(std::string name, double lhs, double rhs, double tolerance);

// Least squares of log y against t on [t0, t1]; needs at least 10 samples, all positive.
DecayReport fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);
// Same fit with log y supplied directly.
DecayReport fit_log_decay_rate(const std::vector<double>& t, const std::vector<double>& log_y, double t0,
                               double t1);

// Smallest nonzero eigenvalue of the discrete -laplacian; C0 = 2 lambda_1.
double first_eigenvalue(const TorusGrid& grid);

struct MaxPrincipleReport {
    double G = 0.0;
    double diameter = 0.0;
    double bound = 0.0;  // G d^2 / 6
    BoundReport distance;
    BoundReport phi2;
};

MaxPrincipleReport check_max_principle(const Trajectory& traj, double L, double rel_tolerance = 1e-3);

// max over mask of (theta_next - theta_prev)/(2 dt) - lap theta, positive part; scale gets max |dt theta|.
double bochner_violation(const TorusGrid& grid, const Field& theta_prev, const Field& theta_curr,
                         const Field& theta_next, double dt, const Mask& mask, double* scale = nullptr);

struct BochnerReport {
    double max_violation = 0.0;
    double scale = 0.0;
    double signed_max = 0.0;  // largest (dt - lap) theta before clipping at zero
    double relative() const { return scale > 0 ? max_violation / scale : 0.0; }
    double signed_relative() const { return scale > 0 ? signed_max / scale : 0.0; }
};
BochnerReport bochner_check(const Trajectory& traj);

struct ThetaDecay {
    DecayReport integral;   // integral of theta^2, reference 2 lambda_1
    DecayReport pointwise;  // weighted sup of the time derivatives, reference lambda_1 / 2
    bool monotone = true;
    double worst_increase = 0.0;
    bool empty = false;
};
ThetaDecay theta_decay_check(const Trajectory& traj, double lambda1, double t0, double t1, double slack = 0.8,
                             double r2_min = 0.9);

struct ExponentFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int shells = 0;
    std::vector<double> radii;
    std::vector<double> maxima;
};
// Log-log regression of shell max |field| on geometric shells in [r0, r1]; shells with fewer
// than 8 nodes are rejected.
ExponentFit exponent_fit(const Field& field, const DistanceField& dist, double r0, double r1, int shells = 6);

struct RegularityRow {
    Point center;
    std::vector<double> sigmas;
    std::vector<double> energies;
    double slope = 0.0;
    double sigma_small = -1.0;  // smallest sigma with E <= 0.1 E_{largest}; -1 if none
};
std::vector<RegularityRow> epsilon_regularity_scan(const TorusGrid& grid, const FlowState& s, const WeightField& w,
                                                   const std::vector<Point>& centers,
                                                   const std::vector<double>& sigmas, int subdivisions = 4);

// Points of the curve next to the grid: the feet of the pinned nodes, one per distinct foot,
// at most `limit` spread along the curve.
std::vector<Point> curve_adjacent_centers(const TorusGrid& grid, const CurveGamma& gamma, const DistanceField& dist,
                                          int limit = 8);

struct ConvergenceReport {
    DecayReport decay;
    SteadyResidual residual;
    double weighted_theta_half = 0.0;
    bool converged_at_start = false;
};
ConvergenceReport convergence_report(const FlowSolver& solver, const Trajectory& traj, double lambda1, double t0,
                                     double t1, double slack = 0.8, double r2_min = 0.9);

// C = sup |u| / (rho^gamma + rho^{gamma-delta} r^2) over the mask.
BoundReport barrier_check(const Field& u, const Field& rho, const Field& r, double gamma, double delta,
                          const Mask& mask, double bound = std::numeric_limits<double>::infinity());

}  // namespace singflow
