#include "singflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace singflow {

namespace fs = std::filesystem;
using nlohmann::json;

Experiment::Experiment(const RunConfig& cfg)
    : cfg_(cfg),
      grid_(cfg.grid.n, cfg.grid.L),
      curve_(make_curve(cfg)),
      dist_(distance_to_curve(grid_, curve_)),
      solver_(grid_),
      weight_(build_weight(solver_, curve_, dist_, cfg.weight.alpha, &poisson_)),
      flow_(grid_, dist_, weight_, solver_) {}

Windows resolve_windows(const RunConfig& cfg) {
    const auto& a = cfg.analysis;
    const double T = cfg.flow.T_final;
    const double s = cfg.grid.L / cfg.grid.n;
    return {a.theta_t0,
            a.theta_t1 > 0 ? a.theta_t1 : T,
            a.convergence_t0,
            a.convergence_t1 > 0 ? a.convergence_t1 : 0.5 * T,
            a.shell_min > 0 ? a.shell_min : 4.0 * s,
            a.shell_max > 0 ? a.shell_max : 0.25 * cfg.grid.L};
}

std::vector<double> regularity_sigmas(const TorusGrid& grid) {
    std::vector<double> out;
    for (double sg = grid.length() / 8.0; sg >= 0.5 * grid.spacing() * (1 - 1e-12); sg *= 0.5) out.push_back(sg);
    return out;
}

namespace {

double log_theta_integral(const TorusGrid& grid, const Field& th) {
    const double m = th.abs().maxCoeff();
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * std::log(m) + std::log(grid.integrate((th / m).square()));
}

Field gradient_magnitude(const TorusGrid& grid, const Field& f) {
    return gradient(grid, f).square().rowwise().sum().sqrt();
}

}  // namespace

RunAnalysis analyze_run(const Experiment& ex, Trajectory& traj) {
    if (traj.snapshots.empty()) throw std::invalid_argument("trajectory holds no snapshots");
    const RunConfig& cfg = ex.config();
    const Windows win = resolve_windows(cfg);
    const TorusGrid& grid = ex.grid();
    const DistanceField& dist = ex.distance();
    const double slack = cfg.analysis.rate_slack;
    const double r2 = cfg.analysis.r2_min;

    RunAnalysis a;
    a.lambda1 = first_eigenvalue(grid);
    fill_convergence_series(ex.flow(), traj);
    a.theta = theta_decay_check(traj, a.lambda1, win.theta_t0, win.theta_t1, slack, r2);
    a.convergence = convergence_report(ex.flow(), traj, a.lambda1, win.convergence_t0, win.convergence_t1, slack, r2);
    a.max_principle = check_max_principle(traj, grid.length());
    a.bochner_available = std::isfinite(traj.bochner_signed_max);
    a.bochner = bochner_check(traj);

    const FlowState& fin = traj.snapshots.back().state;
    try {
        a.phi1_exponent = exponent_fit(fin.phi1, dist, win.shell_min, win.shell_max);
        a.grad_phi2_exponent = exponent_fit(gradient_magnitude(grid, fin.phi2_dev), dist, win.shell_min, win.shell_max);
    } catch (const std::exception& e) {
        a.exponent_error = e.what();
    }

    const auto centers = curve_adjacent_centers(grid, ex.curve(), dist, 8);
    a.regularity = epsilon_regularity_scan(grid, fin, ex.weight(), centers, regularity_sigmas(grid));

    const double excl = 2.0 * grid.spacing();
    a.norms.push_back({"energy_H_final", energy_H(grid, fin, ex.weight()), {}, 0.0, false});
    a.norms.push_back({"theta_l2_final", l2_norm(grid, theta(fin, ex.weight())), {}, 0.0, false});
    if (!traj.cstar2_to_final.empty())
        a.norms.push_back({"cstar2_initial_to_final",
                           traj.cstar2_to_final.front(),
                           {1.5 - cfg.weight.alpha, 1.5},
                           excl,
                           false});
    SpaceTimeSamples samples;
    for (const auto& sn : traj.snapshots) {
        samples.times.push_back(sn.state.t);
        samples.values.push_back(sn.state.phi1);
    }
    for (auto& r : weighted_space_norms(grid, samples, dist, cfg.weight.alpha, cfg.analysis.holder_gamma,
                                        cfg.analysis.holder_beta, cfg.analysis.holder_pairs, cfg.analysis.seed)) {
        r.name = "phi1_" + r.name;
        a.norms.push_back(std::move(r));
    }

    // Barrier exponent halfway inside (2 + beta, 2 alpha).
    const double gamma = 0.5 * (2.0 + cfg.analysis.holder_beta + 2.0 * cfg.weight.alpha);
    const Field r = centers.empty() ? Field::Zero(grid.size()) : curve_projection_field(grid, centers.front(), ex.curve());
    const Mask near = dist.admissible() && (dist.raw <= win.shell_max);
    a.barrier = barrier_check(fin.phi1, dist.rho, r, gamma, 0.5, near);
    return a;
}

Trajectory trajectory_from_snapshots(const Experiment& ex, const std::vector<SnapshotFile>& snaps) {
    if (snaps.empty()) throw std::invalid_argument("no snapshots to analyze");
    const TorusGrid& grid = ex.grid();
    const WeightField& w = ex.weight();
    Trajectory tr;
    tr.bochner_signed_max = -std::numeric_limits<double>::infinity();
    Field phi1_0, logPhi2_0;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const SnapshotFile& sf = snaps[i];
        if (static_cast<int>(sf.n[0]) != grid.n() || sf.L != grid.length() || sf.alpha != w.alpha)
            throw std::invalid_argument("snapshot grid or alpha does not match the configuration");
        FlowState st = state_from_snapshot(sf);
        const Field th = theta(st, w);
        const Field logPhi2 = w.alpha * w.log_h + st.phi2();
        if (i == 0) {
            phi1_0 = st.phi1;
            logPhi2_0 = logPhi2;
            tr.tension_max = std::sqrt(th.maxCoeff());
            tr.sup_abs_phi2_init = st.phi2().abs().maxCoeff();
        } else {
            const auto it = std::find(sf.names.begin(), sf.names.end(), "phi2_mean_step");
            tr.mean_increments.push_back(it != sf.names.end() ? sf.field("phi2_mean_step")[0]
                                                              : st.phi2_mean - tr.snapshots.back().state.phi2_mean);
        }
        SeriesRow row;
        row.t = st.t;
        row.H = energy_H(grid, st, w);
        row.theta_l2 = l2_norm(grid, th);
        row.max_abs_phi2 = st.phi2().abs().maxCoeff();
        row.hyp_dist_to_init = hyperbolic_distance_log(st.phi1, logPhi2, phi1_0, logPhi2_0).maxCoeff();
        const SteadyResidual res = steady_residual(ex.flow(), st);
        row.residual1 = res.r1;
        row.residual2 = res.r2;
        tr.series.push_back(row);
        tr.diagnostics.push_back({st.t, log_theta_integral(grid, th), weighted_time_derivative(ex.flow(), st),
                                  weighted_theta_half(ex.flow(), th), 0.0, 0.0});
        tr.max_hyp_distance = std::max(tr.max_hyp_distance, row.hyp_dist_to_init);
        tr.max_abs_phi2 = std::max(tr.max_abs_phi2, row.max_abs_phi2);
        if (i > 0) {
            const double la = tr.diagnostics[i - 1].log_theta_sq, lb = tr.diagnostics[i].log_theta_sq;
            const double rel = !std::isfinite(lb) ? 0.0 : !std::isfinite(la) ? std::numeric_limits<double>::infinity() : std::expm1(lb - la);
            tr.theta_worst_increase = std::max(tr.theta_worst_increase, rel);
            if (rel > 1e-10) tr.theta_monotone = false;
            const double dH = (row.H - tr.series[i - 1].H) / std::max(tr.series.front().H, 1e-300);
            tr.energy_worst_increase = std::max(tr.energy_worst_increase, dH);
            if (dH > 1e-8) tr.energy_monotone = false;
        }
        tr.snapshots.push_back({i, std::move(st)});
    }
    if (snaps.size() > 1) tr.dt = snaps[1].t - snaps[0].t;
    return tr;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const DecayReport& r) {
    return {{"quantity", r.quantity}, {"amplitude", number(r.amplitude)}, {"rate", number(r.rate)},
            {"t0", r.t0},             {"t1", r.t1},                       {"r2", number(r.r2)},
            {"reference_rate", number(r.reference_rate)},                 {"samples", r.samples},
            {"pass", r.pass},         {"verdict", r.verdict}};
}

json to_json(const BoundReport& r) {
    return {{"name", r.name},
            {"lhs", number(r.lhs)},
            {"rhs", number(r.rhs)},
            {"margin", number(r.margin)},
            {"tolerance", number(r.tolerance)},
            {"pass", r.pass}};
}

json to_json(const NormReport& r) {
    return {{"name", r.name},
            {"value", number(r.value)},
            {"weight_exponents", r.weight_exponents},
            {"exclusion_radius", r.exclusion_radius},
            {"cut_locus_excluded", r.cut_locus_excluded}};
}

json to_json(const RunAnalysis& a) {
    json j;
    j["lambda1"] = a.lambda1;
    j["theta"] = {{"integral", to_json(a.theta.integral)},
                  {"pointwise", to_json(a.theta.pointwise)},
                  {"monotone", a.theta.monotone},
                  {"worst_increase", number(a.theta.worst_increase)},
                  {"empty", a.theta.empty}};
    j["convergence"] = {{"decay", to_json(a.convergence.decay)},
                        {"residual1", number(a.convergence.residual.r1)},
                        {"residual2", number(a.convergence.residual.r2)},
                        {"weighted_theta_half", number(a.convergence.weighted_theta_half)},
                        {"converged_at_start", a.convergence.converged_at_start}};
    j["max_principle"] = {{"G", number(a.max_principle.G)},
                          {"diameter", a.max_principle.diameter},
                          {"bound", number(a.max_principle.bound)},
                          {"distance", to_json(a.max_principle.distance)},
                          {"phi2", to_json(a.max_principle.phi2)}};
    if (a.bochner_available)
        j["bochner"] = {{"max_violation", number(a.bochner.max_violation)},
                        {"signed_max", number(a.bochner.signed_max)},
                        {"scale", number(a.bochner.scale)},
                        {"relative", number(a.bochner.relative())}};
    else
        j["bochner"] = nullptr;
    auto exponent = [](const ExponentFit& f) {
        return json{{"slope", number(f.slope)}, {"stderr", number(f.stderr_)}, {"shells", f.shells},
                    {"radii", f.radii},         {"maxima", f.maxima}};
    };
    if (a.exponent_error.empty())
        j["exponents"] = {{"phi1", exponent(a.phi1_exponent)}, {"grad_phi2", exponent(a.grad_phi2_exponent)}};
    else
        j["exponents"] = {{"error", a.exponent_error}};
    json reg = json::array();
    for (const auto& r : a.regularity) {
        json e;
        e["center"] = {r.center[0], r.center[1], r.center[2]};
        e["sigmas"] = r.sigmas;
        json en = json::array();
        for (double v : r.energies) en.push_back(number(v));
        e["energies"] = en;
        e["slope"] = number(r.slope);
        e["sigma_small"] = r.sigma_small > 0 ? json(r.sigma_small) : json(nullptr);
        reg.push_back(e);
    }
    j["regularity"] = reg;
    json norms = json::array();
    for (const auto& n : a.norms) norms.push_back(to_json(n));
    j["norms"] = norms;
    j["barrier"] = to_json(a.barrier);
    return j;
}

json config_json(const RunConfig& cfg) {
    json j = json::object();
    std::istringstream in(render_config(cfg));
    std::string line, section;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            j[section] = json::object();
            continue;
        }
        const auto eq = line.find(" = ");
        j[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_timeseries_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,H,theta_l2,max_abs_phi2,hyp_dist_to_init,residual1,residual2\n";
    for (const auto& r : traj.series)
        out << fmt(r.t) << ',' << fmt(r.H) << ',' << fmt(r.theta_l2) << ',' << fmt(r.max_abs_phi2) << ','
            << fmt(r.hyp_dist_to_init) << ',' << fmt(r.residual1) << ',' << fmt(r.residual2) << '\n';
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,log_theta_sq,weighted_dt_sup,weighted_theta_half,bochner_violation,bochner_scale\n";
    for (const auto& d : traj.diagnostics)
        out << fmt(d.t) << ',' << fmt(d.log_theta_sq) << ',' << fmt(d.weighted_dt_sup) << ','
            << fmt(d.weighted_theta_half) << ',' << fmt(d.bochner_violation) << ',' << fmt(d.bochner_scale) << '\n';
}

void write_convergence_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t,cstar2_to_final\n";
    for (std::size_t i = 0; i < traj.snapshots.size() && i < traj.cstar2_to_final.size(); ++i)
        out << fmt(traj.snapshots[i].state.t) << ',' << fmt(traj.cstar2_to_final[i]) << '\n';
}

void write_snapshots(const std::string& dir, const Experiment& ex, const Trajectory& traj) {
    fs::create_directories(dir);
    std::size_t prev = 0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto& sn = traj.snapshots[i];
        SnapshotFile f = snapshot_from_state(ex.grid(), ex.weight().alpha, sn.state);
        const double step = i == 0 ? 0.0 : traj.mean_change(prev, sn.step);
        f.names.push_back("phi2_mean_step");
        f.fields.push_back(Field::Constant(ex.grid().size(), step));
        char name[32];
        std::snprintf(name, sizeof name, "snap_%05zu.sgf", i);
        write_snapshot((fs::path(dir) / name).string(), f);
        prev = sn.step;
    }
}

std::vector<SnapshotFile> read_snapshot_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("snapshot directory not found: " + dir);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".sgf") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .sgf files in " + dir);
    std::vector<SnapshotFile> out;
    for (const auto& f : files) out.push_back(read_snapshot(f));
    return out;
}

json run_summary(const Experiment& ex, const Trajectory& traj, const RunAnalysis& a) {
    json j;
    j["config"] = config_json(ex.config());
    const auto& P = ex.poisson();
    j["weight"] = {{"rhs_mean", P.rhs_mean},
                   {"rhs_norm", P.rhs_norm},
                   {"residual", number(P.residual)},
                   {"consistent", P.consistent}};
    json run;
    run["dt"] = traj.dt;
    run["steps"] = traj.series.empty() ? 0 : traj.series.size() - 1;
    run["snapshots"] = traj.snapshots.size();
    run["t_final"] = traj.series.empty() ? 0.0 : traj.series.back().t;
    run["H_initial"] = traj.series.empty() ? 0.0 : traj.series.front().H;
    run["H_final"] = traj.series.empty() ? 0.0 : traj.series.back().H;
    run["energy_monotone"] = traj.energy_monotone;
    run["energy_worst_increase"] = number(traj.energy_worst_increase);
    run["theta_monotone"] = traj.theta_monotone;
    run["tension_max"] = number(traj.tension_max);
    j["run"] = run;
    j["analysis"] = to_json(a);
    return j;
}

void write_run_outputs(const std::string& dir, const Experiment& ex, const Trajectory& traj, const RunAnalysis& a) {
    fs::create_directories(dir);
    const fs::path d(dir);
    write_timeseries_csv((d / "timeseries.csv").string(), traj);
    write_diagnostics_csv((d / "diagnostics.csv").string(), traj);
    write_convergence_csv((d / "convergence.csv").string(), traj);
    write_snapshots((d / "snapshots").string(), ex, traj);
    open_out((d / "config.ini").string()) << render_config(ex.config());
    auto out = open_out((d / "summary.json").string());
    out << run_summary(ex, traj, a).dump(2) << '\n';
}

Forcing standard_forcing(const Experiment& ex, double amplitude, double T, int profile) {
    const TorusGrid& grid = ex.grid();
    const double L = grid.length();
    const double two_alpha = 2.0 * ex.weight().alpha;
    Field f1(grid.size()), f2(grid.size());
    for (Eigen::Index q = 0; q < grid.size(); ++q) {
        const Point x = grid.node(q);
        const double r = ex.distance().rho[q];
        const double k = 2.0 * std::numbers::pi / L;
        f1[q] = amplitude * std::pow(r, two_alpha) * cutoff(r, L) * (1.0 + std::sin(k * x[2]));
        f2[q] = amplitude * (0.25 + std::sin(k * x[0]) + 0.5 * std::cos(k * x[1]));
    }
    Forcing f;
    if (profile == 0) {
        f.terms.push_back({f1, Field(), [T](double t) { return 0.5 * (1.0 - std::cos(std::numbers::pi * t / T)); }});
        f.terms.push_back({Field(), f2, [T](double t) { return (t / T) * (t / T); }});
    } else {
        f.terms.push_back({f1, Field(), [](double) { return 1.0; }});
        f.terms.push_back({Field(), f2, [](double) { return 1.0; }});
    }
    return f;
}

GalerkinSetup galerkin_setup(const Experiment& ex, int N, double amplitude, double T, int profile,
                             double trig_scale) {
    const RunConfig& cfg = ex.config();
    InitialParams p = cfg.flow.params;
    p.a *= trig_scale;
    p.b *= trig_scale;
    const FlowState s0 = ex.flow().init_state(cfg.flow.family, p);
    GalerkinSetup g;
    g.phi0_1 = s0.phi1;
    g.phi0_2 = s0.phi2();
    g.basis = build_basis(ex.grid(), N);
    g.wb = build_weighted_basis(g.basis, ex.weight(), g.phi0_2);
    g.forcing = standard_forcing(ex, amplitude, T, profile);
    g.system = assemble_galerkin(ex.grid(), g.phi0_1, g.phi0_2, ex.weight(), g.basis, g.wb, g.forcing);
    return g;
}

double galerkin_weak_residual(const Experiment& ex, const GalerkinSetup& g) {
    std::vector<FieldPair> tests;
    for (int m = 0; m < g.basis.size(); ++m) tests.push_back({g.wb.psi1.col(m).array(), g.basis.psi.col(m).array()});
    return weak_residual(ex.grid(), g.phi0_1, g.phi0_2, ex.weight(), g.forcing, g.system.times,
                         [&](std::size_t j) { return reconstruct(g.system, g.basis, g.wb, j); }, tests);
}

}  // namespace singflow
