#pragma once

#include "singflow/fft.hpp"
#include "singflow/geometry.hpp"
#include "singflow/operators.hpp"
#include "singflow/weight.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace singflow {

// phi2 is held as a spatial mean plus a zero-mean deviation. The split keeps late-time
// decay of the deviation far below the round-off level of the mean.
struct FlowState {
    Field phi1;
    Field phi2_dev;
    double phi2_mean = 0.0;
    double t = 0.0;
    Field dphi1_dt;
    Field dphi2_dt;
    // Explicit terms at this state, filled by FlowSolver::refresh.
    Field drift;
    Field source;
    Field weight;  // h^{-2 alpha} e^{-2 phi2}

    Field phi2() const { return phi2_dev + phi2_mean; }
};

enum class InitialFamily { zero, poly_cutoff, trig, poly_cutoff_trig };

InitialFamily parse_family(const std::string& name);
std::string family_name(InitialFamily f);

struct InitialParams {
    double c = 1.0;  // poly_cutoff amplitude
    double a = 0.3;  // trig sin(2 pi x1) amplitude
    double b = 0.0;  // trig cos(2 pi x2) amplitude
};

struct FlowConfig {
    InitialFamily family = InitialFamily::poly_cutoff_trig;
    InitialParams params;
    double T_final = 5.0;
    double dt = 0.0;  // 0 selects the CFL policy
    double cfl = 0.25;
    double snapshot_interval = 0.1;
};

// Smooth cutoff equal to 1 for rho <= L/4 and 0 for rho >= 3L/8.
double cutoff(double rho, double L);

struct SteadyResidual {
    double r1 = 0.0;
    double r2 = 0.0;
};

class FlowSolver {
public:
    FlowSolver(const TorusGrid& grid, const DistanceField& dist, const WeightField& w, const PeriodicSolver& solver);

    const TorusGrid& grid() const { return grid_; }
    const DistanceField& distance() const { return dist_; }
    const WeightField& weight() const { return w_; }
    const Mask& pinned() const { return pinned_; }
    const PeriodicSolver& periodic_solver() const { return solver_; }
    const Mask& admissible() const { return admissible_; }

    // rho powers used by the weighted diagnostics, precomputed once.
    struct RhoPowers {
        Field r35a;  // rho^{7/2 - alpha}
        Field r35;   // rho^{7/2}
        Field r15a;  // rho^{3/2 - alpha}
        Field r15;   // rho^{3/2}
    };
    const RhoPowers& rho_powers() const { return powers_; }
    // h^{-2 alpha} e^{-2 phi2} for the state's phi2.
    Field target_weight(const FlowState& s) const;

    FlowState init_state(InitialFamily family, const InitialParams& params) const;
    // Arbitrary initial fields; rejects phi1 that does not vanish like rho^{2 alpha} near the curve.
    FlowState init_state(const Field& phi1, const Field& phi2) const;

    // Recomputes the cached time derivatives from the fields.
    void refresh(FlowState& s) const;

    // One IMEX Euler step; the mean of the phi2 source is added to phi2_mean and
    // reported through mean_increment.
    FlowState step(const FlowState& s, double dt, double* mean_increment = nullptr) const;

    // 0.25 s min(rho) / (2 alpha + max|grad phi2| min(rho)) with min over unpinned nodes, scaled by c/0.25.
    double cfl_dt(const FlowState& s, double c) const;

private:
    TorusGrid grid_;
    const DistanceField& dist_;
    const WeightField& w_;
    const PeriodicSolver& solver_;
    Mask pinned_;
    Mask admissible_;
    Field log_w0_;  // -2 alpha log h
    RhoPowers powers_;
};

// Sup-norm residuals of the steady system weighted by rho^{7/2-alpha} and rho^{7/2} over admissible nodes.
SteadyResidual steady_residual(const FlowSolver& solver, const FlowState& s);

// sup rho^{7/2} theta^{1/2} over admissible nodes.
double weighted_theta_half(const FlowSolver& solver, const FlowState& s);
double weighted_theta_half(const FlowSolver& solver, const Field& theta);

// sup rho^{3/2-alpha}|d phi1/dt| + rho^{3/2}|d phi2/dt| over admissible nodes.
double weighted_time_derivative(const FlowSolver& solver, const FlowState& s);

struct SeriesRow {
    double t, H, theta_l2, max_abs_phi2, hyp_dist_to_init, residual1, residual2;
};

struct DiagnosticRow {
    double t;
    double log_theta_sq;        // log of the integral of theta^2
    double weighted_dt_sup;     // rho^{3/2-alpha}|d phi1/dt| + rho^{3/2}|d phi2/dt|
    double weighted_theta_half; // rho^{7/2} theta^{1/2}
    double bochner_violation;   // max of (dt - lap) theta, positive part, at this step
    double bochner_scale;       // max |dt theta| at this step
};

struct Snapshot {
    std::size_t step = 0;
    FlowState state;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<SeriesRow> series;
    std::vector<DiagnosticRow> diagnostics;
    std::vector<Snapshot> snapshots;
    std::vector<double> mean_increments;  // per step
    std::vector<double> cstar2_to_final;  // per snapshot, filled in a post-pass
    double tension_max = 0.0;             // G = max theta(0)^{1/2}
    double sup_abs_phi2_init = 0.0;
    double max_hyp_distance = 0.0;
    double max_abs_phi2 = 0.0;
    double bochner_max = 0.0;        // max over steps of the positive part
    double bochner_scale = 0.0;      // max over steps of |dt theta|
    double bochner_signed_max = -std::numeric_limits<double>::infinity();
    bool theta_monotone = true;
    double theta_worst_increase = 0.0;  // largest relative step increase of the theta integral
    bool energy_monotone = true;
    double energy_worst_increase = 0.0;  // largest step increase of H relative to H(0)

    // phi2_mean(snapshot b) - phi2_mean(snapshot a) from the per-step increments.
    double mean_change(std::size_t step_a, std::size_t step_b) const;
};

struct RunHooks {
    std::function<void(std::size_t step, const FlowState&)> on_step;
};

Trajectory run(const FlowSolver& solver, const FlowConfig& config, const RunHooks& hooks = {});

// C_+^2 distance of every snapshot to the last one.
void fill_convergence_series(const FlowSolver& solver, Trajectory& traj);

// Explicit-drift, implicit-diffusion stepper for the linearized system D P(phi0) k = f.
class LinearizedSolver {
public:
    LinearizedSolver(const FlowSolver& flow, Field phi0_1, Field phi0_2);
    FieldPair step(const FieldPair& k, const FieldPair& f, double dt) const;

private:
    const FlowSolver& flow_;
    Field phi0_1_, phi0_2_;
    VectorField g1_, drift_;
    Field weight_;
};

}  // namespace singflow
