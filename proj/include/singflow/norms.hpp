#pragma once

#include "singflow/flow.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace singflow {

struct NormReport {
    std::string name;
    double value = 0.0;
    std::vector<double> weight_exponents;
    double exclusion_radius = 0.0;
    bool cut_locus_excluded = false;
};

// Integral of h^{-2a} e^{-2 phi2}|grad phi1|^2 + |grad phi2|^2 on cell faces.
double energy_H(const TorusGrid& grid, const FlowState& s, const WeightField& w);

// h^{-2a} e^{-2 phi2}|dphi1/dt|^2 + |dphi2/dt|^2.
Field theta(const FlowState& s, const WeightField& w);

// (integral of f^2)^{1/2}, scaled by max|f| so tiny fields do not underflow.
double l2_norm(const TorusGrid& grid, const Field& f);
inline double theta_l2(const TorusGrid& grid, const Field& th) { return l2_norm(grid, th); }

// sum_k max (|grad^k w1| rho^{k+3/2-a} + |grad^k w2| rho^{k+3/2}) over nodes with raw rho >= 2 spacing.
double cstar2_norm(const TorusGrid& grid, const Field& w1, const Field& w2, const DistanceField& dist,
                   double alpha);

// Distance in the upper half-plane between (phi1, Phi2) and (phi1_0, Phi2_0).
Field hyperbolic_distance(const Field& phi1, const Field& Phi2, const Field& phi1_0, const Field& Phi2_0);
// Same, with Phi2 = exp(log_Phi2). Only the difference log_Phi2 - log_Phi2_0 is formed, so large or
// tiny Phi2 are handled.
Field hyperbolic_distance_log(const Field& phi1, const Field& log_Phi2, const Field& phi1_0,
                              const Field& log_Phi2_0);

struct LocalEnergy {
    double f = 0.0;
    double g = 0.0;
    double E = 0.0;
};

// Ball integrals over B_sigma(x) with every cell split into m^3 sub-cells carrying the nodal value.
// m = 1 is plain node membership.
LocalEnergy local_energy_E(const TorusGrid& grid, const FlowState& s, const WeightField& w, const Point& x,
                           double sigma, int m = 4);

// Parabolic distance max(|x-y|, |s-t|^{1/2}) with the periodic spatial metric.
double parabolic_distance(const Point& x, double s, const Point& y, double t, double L);

struct SpaceTimeSamples {
    std::vector<double> times;
    std::vector<Field> values;
};

// W^{2,1}_2(rho^{-a}) norm and the sampled weighted Hoelder seminorm of u over the samples.
std::vector<NormReport> weighted_space_norms(const TorusGrid& grid, const SpaceTimeSamples& u,
                                             const DistanceField& dist, double alpha, double gamma, double beta,
                                             std::size_t pairs = 100000, std::uint64_t seed = 12345);

}  // namespace singflow
