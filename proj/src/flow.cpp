#include "singflow/flow.hpp"

#include "singflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace singflow {

namespace {

double smooth_step_kernel(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

// Relative change of a positive series, computed in log space.
double relative_increase(double log_prev, double log_next) {
    if (!std::isfinite(log_next)) return 0.0;
    if (!std::isfinite(log_prev)) return std::numeric_limits<double>::infinity();
    return std::expm1(log_next - log_prev);
}

double log_integral_square(const TorusGrid& grid, const Field& f) {
    const double m = f.abs().maxCoeff();
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * std::log(m) + std::log(grid.integrate((f / m).square()));
}

}  // namespace

InitialFamily parse_family(const std::string& name) {
    if (name == "zero") return InitialFamily::zero;
    if (name == "poly_cutoff") return InitialFamily::poly_cutoff;
    if (name == "trig") return InitialFamily::trig;
    if (name == "poly_cutoff_trig") return InitialFamily::poly_cutoff_trig;
    throw std::invalid_argument("unknown initial family '" + name + "'");
}

std::string family_name(InitialFamily f) {
    switch (f) {
        case InitialFamily::zero: return "zero";
        case InitialFamily::poly_cutoff: return "poly_cutoff";
        case InitialFamily::trig: return "trig";
        case InitialFamily::poly_cutoff_trig: return "poly_cutoff_trig";
    }
    return "zero";
}

double cutoff(double rho, double L) {
    const double t = (rho - 0.25 * L) / (0.125 * L);
    if (t <= 0) return 1.0;
    if (t >= 1) return 0.0;
    const double a = smooth_step_kernel(1.0 - t), b = smooth_step_kernel(t);
    return a / (a + b);
}

FlowSolver::FlowSolver(const TorusGrid& grid, const DistanceField& dist, const WeightField& w,
                       const PeriodicSolver& solver)
    : grid_(grid),
      dist_(dist),
      w_(w),
      solver_(solver),
      pinned_(dist.pinned()),
      admissible_(dist.admissible()),
      log_w0_(-2.0 * w.alpha * w.log_h) {
    powers_.r35a = dist.rho.pow(3.5 - w.alpha);
    powers_.r35 = dist.rho.pow(3.5);
    powers_.r15a = dist.rho.pow(1.5 - w.alpha);
    powers_.r15 = dist.rho.pow(1.5);
}

Field FlowSolver::target_weight(const FlowState& s) const {
    if (s.weight.size() == grid_.size()) return s.weight;
    return (log_w0_ - 2.0 * (s.phi2_dev + s.phi2_mean)).exp();
}

void FlowSolver::refresh(FlowState& s) const {
    const VectorField g1 = gradient(grid_, s.phi1);
    const VectorField g2 = gradient(grid_, s.phi2_dev);
    s.weight = (log_w0_ - 2.0 * (s.phi2_dev + s.phi2_mean)).exp();
    s.source = s.weight * g1.square().rowwise().sum();
    s.drift = 2.0 * ((g2 + w_.alpha * w_.grad_log_h) * g1).rowwise().sum();
    s.dphi1_dt = laplacian(grid_, s.phi1) - s.drift;
    for (Eigen::Index q = 0; q < s.dphi1_dt.size(); ++q)
        if (pinned_[q]) s.dphi1_dt[q] = 0.0;
    s.dphi2_dt = laplacian(grid_, s.phi2_dev) + s.source;
}

FlowState FlowSolver::init_state(InitialFamily family, const InitialParams& p) const {
    const double L = grid_.length();
    const double order = 2.0 * w_.alpha + 2.0;
    Field phi1 = Field::Zero(grid_.size());
    Field phi2 = Field::Zero(grid_.size());
    if (family == InitialFamily::poly_cutoff || family == InitialFamily::poly_cutoff_trig) {
        for (Eigen::Index q = 0; q < grid_.size(); ++q) {
            const Point x = grid_.node(q);
            const double r = dist_.rho[q];
            phi1[q] = p.c * std::pow(r, order) * cutoff(r, L) * std::sin(2.0 * std::numbers::pi * x[2] / L);
        }
    }
    if (family == InitialFamily::trig || family == InitialFamily::poly_cutoff_trig) {
        for (Eigen::Index q = 0; q < grid_.size(); ++q) {
            const Point x = grid_.node(q);
            phi2[q] = p.a * std::sin(2.0 * std::numbers::pi * x[0] / L) + p.b * std::cos(2.0 * std::numbers::pi * x[1] / L);
        }
    }
    return init_state(phi1, phi2);
}

FlowState FlowSolver::init_state(const Field& phi1, const Field& phi2) const {
    // Shell maxima of |phi1| on three shells next to the curve must fall at least like rho^{2 alpha}.
    const double s = grid_.spacing();
    const double edges[4] = {2 * s, 3 * s, 4.5 * s, 6.75 * s};
    double logmax[3], logr[3];
    bool usable = true;
    for (int k = 0; k < 3; ++k) {
        double m = 0.0;
        int count = 0;
        for (Eigen::Index q = 0; q < phi1.size(); ++q)
            if (dist_.raw[q] >= edges[k] && dist_.raw[q] < edges[k + 1]) {
                m = std::max(m, std::fabs(phi1[q]));
                ++count;
            }
        if (count == 0 || m == 0.0) usable = false;
        logmax[k] = std::log(m);
        logr[k] = std::log(std::sqrt(edges[k] * edges[k + 1]));
    }
    if (usable) {
        const double slope = (logmax[2] - logmax[0]) / (logr[2] - logr[0]);
        if (slope < 2.0 * w_.alpha - 0.5) {
            std::ostringstream os;
            os << "initial phi1 vanishes like rho^" << slope << " near the curve; need at least rho^"
               << 2.0 * w_.alpha;
            throw std::invalid_argument(os.str());
        }
    }

    FlowState st;
    st.phi1 = phi1;
    for (Eigen::Index q = 0; q < st.phi1.size(); ++q)
        if (pinned_[q]) st.phi1[q] = 0.0;
    st.phi2_mean = grid_.mean(phi2);
    st.phi2_dev = phi2 - st.phi2_mean;
    st.t = 0.0;
    refresh(st);
    return st;
}

FlowState FlowSolver::step(const FlowState& s, double dt, double* mean_increment) const {
    if (s.drift.size() != grid_.size() || s.source.size() != grid_.size()) {
        FlowState r = s;
        refresh(r);
        return step(r, dt, mean_increment);
    }
    const Field& src = s.source;
    const Field& drift = s.drift;

    FlowState out;
    out.phi1 = solver_.solve_shifted(s.phi1 - dt * drift, dt);
    for (Eigen::Index q = 0; q < out.phi1.size(); ++q)
        if (pinned_[q]) out.phi1[q] = 0.0;
    const double src_mean = grid_.mean(src);
    out.phi2_mean = s.phi2_mean + dt * src_mean;
    out.phi2_dev = solver_.solve_shifted(s.phi2_dev + dt * (src - src_mean), dt);
    out.phi2_dev -= grid_.mean(out.phi2_dev);
    out.t = s.t + dt;
    if (mean_increment) *mean_increment = dt * src_mean;

    if (!out.phi1.allFinite() || !out.phi2_dev.allFinite() || !std::isfinite(out.phi2_mean)) {
        std::ostringstream os;
        os << "non-finite field at t=" << out.t << ", max |drift| = " << drift.abs().maxCoeff();
        throw std::runtime_error(os.str());
    }
    refresh(out);
    return out;
}

double FlowSolver::cfl_dt(const FlowState& s, double c) const {
    double min_rho = std::numeric_limits<double>::infinity();
    for (Eigen::Index q = 0; q < dist_.raw.size(); ++q)
        if (!pinned_[q]) min_rho = std::min(min_rho, dist_.raw[q]);
    const double g = gradient(grid_, s.phi2_dev).square().rowwise().sum().sqrt().maxCoeff();
    return c * grid_.spacing() * min_rho / (2.0 * w_.alpha + g * min_rho);
}

SteadyResidual steady_residual(const FlowSolver& solver, const FlowState& s) {
    const auto& grid = solver.grid();
    const auto& w = solver.weight();
    const VectorField g1 = gradient(grid, s.phi1);
    const VectorField g2 = gradient(grid, s.phi2_dev);
    const Field e1 = laplacian(grid, s.phi1) - 2.0 * ((g2 + w.alpha * w.grad_log_h) * g1).rowwise().sum();
    const Field e2 = laplacian(grid, s.phi2_dev) + solver.target_weight(s) * g1.square().rowwise().sum();
    const Mask& keep = solver.admissible();
    const auto& p = solver.rho_powers();
    SteadyResidual r;
    for (Eigen::Index q = 0; q < keep.size(); ++q) {
        if (!keep[q]) continue;
        r.r1 = std::max(r.r1, p.r35a[q] * std::fabs(e1[q]));
        r.r2 = std::max(r.r2, p.r35[q] * std::fabs(e2[q]));
    }
    return r;
}

double weighted_theta_half(const FlowSolver& solver, const Field& th) {
    const Mask& keep = solver.admissible();
    const Field& r35 = solver.rho_powers().r35;
    double m = 0.0;
    for (Eigen::Index q = 0; q < keep.size(); ++q)
        if (keep[q]) m = std::max(m, r35[q] * std::sqrt(th[q]));
    return m;
}

double weighted_theta_half(const FlowSolver& solver, const FlowState& s) {
    return weighted_theta_half(solver, theta(s, solver.weight()));
}

double weighted_time_derivative(const FlowSolver& solver, const FlowState& s) {
    const Mask& keep = solver.admissible();
    const auto& p = solver.rho_powers();
    double m = 0.0;
    for (Eigen::Index q = 0; q < keep.size(); ++q)
        if (keep[q])
            m = std::max(m, p.r15a[q] * std::fabs(s.dphi1_dt[q]) + p.r15[q] * std::fabs(s.dphi2_dt[q]));
    return m;
}

double Trajectory::mean_change(std::size_t step_a, std::size_t step_b) const {
    double acc = 0.0;
    if (step_b >= step_a)
        for (std::size_t j = step_b; j-- > step_a;) acc += mean_increments[j];
    else
        for (std::size_t j = step_a; j-- > step_b;) acc -= mean_increments[j];
    return acc;
}

namespace {

struct StepMetrics {
    SeriesRow row;
    double log_theta_sq;
    double weighted_dt;
    double weighted_half;
};

StepMetrics measure(const FlowSolver& solver, const FlowState& s, const FlowState& init, const Field& inv_Phi2_0,
                    const Field& wt, const Field& theta_field) {
    const auto& grid = solver.grid();
    StepMetrics m;
    m.row.t = s.t;

    const VectorField d1 = face_gradient(grid, s.phi1);
    const VectorField d2 = face_gradient(grid, s.phi2_dev);
    double e = d2.square().sum();
    {
        const int n = grid.n();
        const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const Eigen::Index c = i * nn + j * n + k;
                    const Eigen::Index nb[3] = {((i + 1) % n) * nn + j * n + k, i * nn + ((j + 1) % n) * n + k,
                                                i * nn + j * n + (k + 1) % n};
                    for (int a = 0; a < 3; ++a) e += std::sqrt(wt[c] * wt[nb[a]]) * d1(c, a) * d1(c, a);
                }
    }
    m.row.H = e * grid.cell_volume();
    m.row.theta_l2 = l2_norm(grid, theta_field);
    m.log_theta_sq = log_integral_square(grid, theta_field);
    m.row.max_abs_phi2 = (s.phi2_dev + s.phi2_mean).abs().maxCoeff();

    // Distance to the initial map; 2 atanh(sqrt(x)) is increasing, so only the largest ratio is mapped.
    double worst = 0.0;
    const double dmean = s.phi2_mean - init.phi2_mean;
    for (Eigen::Index q = 0; q < s.phi1.size(); ++q) {
        const double dx = (s.phi1[q] - init.phi1[q]) * inv_Phi2_0[q];
        const double ex = std::expm1((s.phi2_dev[q] - init.phi2_dev[q]) + dmean);
        const double num = dx * dx + ex * ex;
        worst = std::max(worst, num / (dx * dx + (2.0 + ex) * (2.0 + ex)));
    }
    m.row.hyp_dist_to_init = worst > 0 ? 2.0 * std::atanh(std::sqrt(worst)) : 0.0;

    // The cached derivatives are the steady-system residuals off the pinned ring.
    const Mask& keep = solver.admissible();
    const auto& p = solver.rho_powers();
    double r1 = 0, r2 = 0, wd = 0, wh = 0;
    for (Eigen::Index q = 0; q < keep.size(); ++q) {
        if (!keep[q]) continue;
        const double a1 = std::fabs(s.dphi1_dt[q]), a2 = std::fabs(s.dphi2_dt[q]);
        r1 = std::max(r1, p.r35a[q] * a1);
        r2 = std::max(r2, p.r35[q] * a2);
        wd = std::max(wd, p.r15a[q] * a1 + p.r15[q] * a2);
        wh = std::max(wh, p.r35[q] * std::sqrt(theta_field[q]));
    }
    m.row.residual1 = r1;
    m.row.residual2 = r2;
    m.weighted_dt = wd;
    m.weighted_half = wh;
    return m;
}

}  // namespace

Trajectory run(const FlowSolver& solver, const FlowConfig& cfg, const RunHooks& hooks) {
    if (!(cfg.T_final > 0)) throw std::invalid_argument("T_final must be positive");
    if (!(cfg.snapshot_interval > 0)) throw std::invalid_argument("snapshot interval must be positive");
    const auto& grid = solver.grid();
    const auto& w = solver.weight();

    FlowState s = solver.init_state(cfg.family, cfg.params);
    const FlowState init = s;

    // dt divides the snapshot interval, which divides T.
    const auto snaps = static_cast<std::size_t>(std::max(1LL, std::llround(cfg.T_final / cfg.snapshot_interval)));
    const double interval = cfg.T_final / static_cast<double>(snaps);
    const double dt_target = cfg.dt > 0 ? cfg.dt : solver.cfl_dt(s, cfg.cfl);
    const auto per_snap = static_cast<std::size_t>(std::ceil(interval / dt_target - 1e-9));
    const double dt = interval / static_cast<double>(per_snap);
    const std::size_t steps = snaps * per_snap;

    Trajectory traj;
    traj.dt = dt;
    traj.series.reserve(steps + 1);
    traj.diagnostics.reserve(steps + 1);
    traj.mean_increments.reserve(steps);

    const Field inv_Phi2_0 = (-(w.alpha * w.log_h + s.phi2())).exp();
    const Mask& interior = solver.admissible();

    auto theta_of = [&](const FlowState& st, Field& wt) {
        wt = st.weight;
        return Field(wt * st.dphi1_dt.square() + st.dphi2_dt.square());
    };
    Field wt_curr, wt_next;
    Field th_prev, th_curr = theta_of(s, wt_curr);
    traj.tension_max = std::sqrt(th_curr.maxCoeff());
    traj.sup_abs_phi2_init = s.phi2().abs().maxCoeff();

    auto record = [&](const FlowState& st, const Field& wt, const Field& th) {
        const StepMetrics m = measure(solver, st, init, inv_Phi2_0, wt, th);
        traj.series.push_back(m.row);
        traj.diagnostics.push_back({st.t, m.log_theta_sq, m.weighted_dt, m.weighted_half, 0.0, 0.0});
        traj.max_hyp_distance = std::max(traj.max_hyp_distance, m.row.hyp_dist_to_init);
        traj.max_abs_phi2 = std::max(traj.max_abs_phi2, m.row.max_abs_phi2);
    };
    // Snapshots keep the fields only; the cached explicit terms are rebuilt on demand.
    auto lean = [](const FlowState& st) {
        FlowState c = st;
        c.drift = Field();
        c.source = Field();
        c.weight = Field();
        return c;
    };
    record(s, wt_curr, th_curr);
    traj.snapshots.push_back({0, lean(s)});
    if (hooks.on_step) hooks.on_step(0, s);

    const double H0 = traj.series.front().H;
    for (std::size_t j = 0; j < steps; ++j) {
        double inc = 0.0;
        FlowState next = solver.step(s, dt, &inc);
        // Pin the clock to the schedule rather than accumulating dt.
        next.t = dt * static_cast<double>(j + 1);
        traj.mean_increments.push_back(inc);
        Field th_next = theta_of(next, wt_next);

        if (th_prev.size()) {
            // (theta_{j+1} - theta_{j-1}) / 2dt - lap theta_j at step j.
            const Field dth = (th_next - th_prev) / (2.0 * dt);
            const Field lap = laplacian(grid, th_curr);
            double vmax = -std::numeric_limits<double>::infinity(), scale = 0.0;
            for (Eigen::Index q = 0; q < interior.size(); ++q) {
                if (!interior[q]) continue;
                vmax = std::max(vmax, dth[q] - lap[q]);
                scale = std::max(scale, std::fabs(dth[q]));
            }
            traj.diagnostics.back().bochner_violation = std::max(vmax, 0.0);
            traj.diagnostics.back().bochner_scale = scale;
            traj.bochner_max = std::max(traj.bochner_max, vmax);
            traj.bochner_signed_max = std::max(traj.bochner_signed_max, vmax);
            traj.bochner_scale = std::max(traj.bochner_scale, scale);
        }

        record(next, wt_next, th_next);
        const auto& a = traj.diagnostics[traj.diagnostics.size() - 2];
        const auto& b = traj.diagnostics.back();
        const double rel = relative_increase(a.log_theta_sq, b.log_theta_sq);
        traj.theta_worst_increase = std::max(traj.theta_worst_increase, rel);
        if (rel > 1e-10) traj.theta_monotone = false;
        const double dH = (traj.series.back().H - traj.series[traj.series.size() - 2].H) / std::max(H0, 1e-300);
        traj.energy_worst_increase = std::max(traj.energy_worst_increase, dH);
        if (dH > 1e-8) traj.energy_monotone = false;

        th_prev = std::move(th_curr);
        th_curr = std::move(th_next);
        s = std::move(next);
        if ((j + 1) % per_snap == 0) traj.snapshots.push_back({j + 1, lean(s)});
        if (hooks.on_step) hooks.on_step(j + 1, s);
    }
    return traj;
}

void fill_convergence_series(const FlowSolver& solver, Trajectory& traj) {
    traj.cstar2_to_final.clear();
    if (traj.snapshots.empty()) return;
    const auto& fin = traj.snapshots.back();
    for (const auto& sn : traj.snapshots) {
        const Field w1 = sn.state.phi1 - fin.state.phi1;
        const Field w2 = (sn.state.phi2_dev - fin.state.phi2_dev) - traj.mean_change(sn.step, fin.step);
        traj.cstar2_to_final.push_back(
            cstar2_norm(solver.grid(), w1, w2, solver.distance(), solver.weight().alpha));
    }
}

LinearizedSolver::LinearizedSolver(const FlowSolver& flow, Field phi0_1, Field phi0_2)
    : flow_(flow), phi0_1_(std::move(phi0_1)), phi0_2_(std::move(phi0_2)) {
    const auto& grid = flow.grid();
    const auto& w = flow.weight();
    g1_ = gradient(grid, phi0_1_);
    drift_ = gradient(grid, phi0_2_) + w.alpha * w.grad_log_h;
    weight_ = target_weight(w, phi0_2_);
}

FieldPair LinearizedSolver::step(const FieldPair& k, const FieldPair& f, double dt) const {
    const auto& grid = flow_.grid();
    const VectorField gk1 = gradient(grid, k.first);
    const VectorField gk2 = gradient(grid, k.second);
    const Field e1 = -2.0 * (drift_ * gk1).rowwise().sum() - 2.0 * (g1_ * gk2).rowwise().sum() + f.first;
    const Field e2 = -2.0 * weight_ * g1_.square().rowwise().sum() * k.second +
                     2.0 * weight_ * (g1_ * gk1).rowwise().sum() + f.second;
    const PeriodicSolver& ps = flow_.periodic_solver();
    FieldPair out{ps.solve_shifted(k.first + dt * e1, dt), ps.solve_shifted(k.second + dt * e2, dt)};
    const Mask& pin = flow_.pinned();
    for (Eigen::Index q = 0; q < pin.size(); ++q)
        if (pin[q]) out.first[q] = 0.0;
    return out;
}

}  // namespace singflow
