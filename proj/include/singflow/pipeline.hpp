#pragma once

#include "singflow/analysis.hpp"
#include "singflow/config.hpp"
#include "singflow/fft.hpp"
#include "singflow/snapshot.hpp"
#include "singflow/spectral.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace singflow {

// Grid, curve, distance field, weight and flow solver for one configuration.
class Experiment {
public:
    explicit Experiment(const RunConfig& cfg);
    Experiment(const Experiment&) = delete;
    Experiment& operator=(const Experiment&) = delete;

    const RunConfig& config() const { return cfg_; }
    const TorusGrid& grid() const { return grid_; }
    const CurveGamma& curve() const { return curve_; }
    const DistanceField& distance() const { return dist_; }
    const PeriodicSolver& periodic_solver() const { return solver_; }
    const PoissonSolution& poisson() const { return poisson_; }
    const WeightField& weight() const { return weight_; }
    const FlowSolver& flow() const { return flow_; }

private:
    RunConfig cfg_;
    TorusGrid grid_;
    CurveGamma curve_;
    DistanceField dist_;
    PeriodicSolver solver_;
    PoissonSolution poisson_;
    WeightField weight_;
    FlowSolver flow_;
};

// Analysis windows with the config's zero placeholders resolved.
struct Windows {
    double theta_t0, theta_t1;
    double convergence_t0, convergence_t1;
    double shell_min, shell_max;
};
Windows resolve_windows(const RunConfig& cfg);

// L/8, L/16, ... down to half a grid spacing.
std::vector<double> regularity_sigmas(const TorusGrid& grid);

struct RunAnalysis {
    double lambda1 = 0.0;
    ThetaDecay theta;
    ConvergenceReport convergence;
    MaxPrincipleReport max_principle;
    BochnerReport bochner;
    bool bochner_available = true;
    ExponentFit phi1_exponent;
    ExponentFit grad_phi2_exponent;
    std::string exponent_error;
    std::vector<RegularityRow> regularity;
    std::vector<NormReport> norms;
    BoundReport barrier;
};

// Fills the convergence series of traj and runs every trajectory check.
RunAnalysis analyze_run(const Experiment& ex, Trajectory& traj);

// Rebuilds a coarse trajectory (one entry per snapshot) from snapshot files.
Trajectory trajectory_from_snapshots(const Experiment& ex, const std::vector<SnapshotFile>& snaps);

nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const NormReport& r);
nlohmann::json to_json(const RunAnalysis& a);
nlohmann::json config_json(const RunConfig& cfg);
// Doubles that are not finite become null.
nlohmann::json number(double v);

void write_timeseries_csv(const std::string& path, const Trajectory& traj);
void write_diagnostics_csv(const std::string& path, const Trajectory& traj);
void write_convergence_csv(const std::string& path, const Trajectory& traj);
// One file per snapshot, snap_00000.sgf onwards. Each file also carries phi2_mean_step, the
// change of the phi2 mean since the previous snapshot, summed step by step during the run.
void write_snapshots(const std::string& dir, const Experiment& ex, const Trajectory& traj);
std::vector<SnapshotFile> read_snapshot_dir(const std::string& dir);

// Run summary: configuration echo, step data, weight solve diagnostics and the analysis.
nlohmann::json run_summary(const Experiment& ex, const Trajectory& traj, const RunAnalysis& a);
// config.ini, timeseries.csv, diagnostics.csv, convergence.csv, snapshots/ and summary.json under dir.
void write_run_outputs(const std::string& dir, const Experiment& ex, const Trajectory& traj, const RunAnalysis& a);

// Smooth right-hand side for the linearized problem. Profile 0 ramps in smoothly from zero,
// profile 1 is constant in time.
Forcing standard_forcing(const Experiment& ex, double amplitude, double T, int profile = 0);

struct GalerkinSetup {
    Field phi0_1, phi0_2;
    SpectralBasis basis;
    WeightedBasis wb;
    Forcing forcing;
    GalerkinSystem system;
};

// Basis, weighted basis and assembled system around the configured initial state.
GalerkinSetup galerkin_setup(const Experiment& ex, int N, double amplitude, double T, int profile = 0,
                             double trig_scale = 1.0);

// Weak-identity defect of the integrated system against its own span.
double galerkin_weak_residual(const Experiment& ex, const GalerkinSetup& g);

}  // namespace singflow
