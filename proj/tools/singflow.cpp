// singflow: run, galerkin, analyze and verify subcommands.

#include "singflow/config.hpp"
#include "singflow/pipeline.hpp"
#include "singflow/verify.hpp"

#include "CLI11.hpp"

#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace singflow;

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::string run_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

RunConfig load(const Options& o, const std::string& path) {
    auto overrides = environment_overrides();
    if (o.seed_set) overrides["analysis.seed"] = std::to_string(o.seed);
    RunConfig c = parse_config(path, overrides);
    c.threads = o.threads;
    return c;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << j.dump(2) << '\n';
}

void progress(const std::string& s) { std::cerr << s << '\n'; }

int cmd_run(const Options& o) {
    const RunConfig cfg = load(o, o.config);
    Experiment ex(cfg);
    Trajectory traj = run(ex.flow(), cfg.flow);
    const RunAnalysis a = analyze_run(ex, traj);
    write_run_outputs(o.out, ex, traj, a);
    std::printf("%zu steps, dt=%.6g, H: %.6g -> %.6g\n", traj.series.size() - 1, traj.dt, traj.series.front().H,
                traj.series.back().H);
    return 0;
}

int cmd_galerkin(const Options& o) {
    const RunConfig cfg = load(o, o.config);
    Experiment ex(cfg);
    GalerkinSetup g = galerkin_setup(ex, cfg.galerkin.N, cfg.galerkin.forcing, cfg.galerkin.T);
    integrate_ode(g.system, cfg.galerkin.T, cfg.galerkin.dt);
    const double weak = galerkin_weak_residual(ex, g);
    const EnergyEstimate e =
        energy_estimate(ex.grid(), g.system, g.basis, g.wb, ex.distance(), cfg.weight.alpha, g.forcing);
    const double cp = weighted_poincare_constant(ex.grid(), ex.weight(), g.wb);

    const fs::path d(o.out);
    fs::create_directories(d);
    write_matrix_csv((d / "A.csv").string(), g.system.A);
    write_matrix_csv((d / "B.csv").string(), g.system.B);
    write_matrix_csv((d / "C.csv").string(), g.system.C);
    write_matrix_csv((d / "D.csv").string(), g.system.D);
    {
        std::ofstream f(d / "coefficients.csv");
        if (!f) throw std::runtime_error("cannot write " + (d / "coefficients.csv").string());
        f << "t";
        for (int m = 0; m < g.system.N; ++m) f << ",c1_" << m;
        for (int m = 0; m < g.system.N; ++m) f << ",c2_" << m;
        f << '\n';
        char buf[32];
        for (std::size_t j = 0; j < g.system.times.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", g.system.times[j]);
            f << buf;
            for (Eigen::Index r = 0; r < g.system.coefficients.rows(); ++r) {
                std::snprintf(buf, sizeof buf, "%.17g", g.system.coefficients(r, static_cast<Eigen::Index>(j)));
                f << ',' << buf;
            }
            f << '\n';
        }
    }
    nlohmann::json modes = nlohmann::json::array();
    for (int m = 0; m < g.basis.size(); ++m)
        modes.push_back({{"k", g.basis.wave_vectors[m]}, {"eigenvalue", g.basis.discrete_eigenvalues[m]}});
    write_json(d / "galerkin.json", {{"config", config_json(cfg)},
                                     {"N", g.system.N},
                                     {"modes", modes},
                                     {"weak_residual", number(weak)},
                                     {"energy_lhs", number(e.lhs)},
                                     {"energy_rhs", number(e.rhs)},
                                     {"energy_ratio", number(e.ratio())},
                                     {"poincare_constant", number(cp)}});
    std::printf("N=%d, weak residual %.3e, energy ratio %.4g, C_P %.4g\n", g.system.N, weak, e.ratio(), cp);
    return 0;
}

int cmd_analyze(const Options& o) {
    const fs::path dir(o.run_dir);
    if (!fs::is_directory(dir)) throw std::runtime_error("run directory not found: " + dir.string());
    const std::string cfg_path = o.config.empty() ? (dir / "config.ini").string() : o.config;
    const RunConfig cfg = load(o, cfg_path);
    Experiment ex(cfg);
    const auto snaps = read_snapshot_dir((dir / "snapshots").string());
    Trajectory traj = trajectory_from_snapshots(ex, snaps);
    const RunAnalysis a = analyze_run(ex, traj);
    const fs::path out = o.out.empty() ? dir : fs::path(o.out);
    fs::create_directories(out);
    write_json(out / "analysis.json", {{"snapshots", snaps.size()}, {"analysis", to_json(a)}});
    std::printf("%zu snapshots analyzed, theta rate %.4g\n", snaps.size(), a.theta.integral.rate);
    return 0;
}

int cmd_verify(const Options& o) {
    const RunConfig cfg = load(o, o.config);
    const auto verdicts = run_acceptance(cfg, progress);
    std::cout << verdict_table(verdicts);
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_json(fs::path(o.out) / "verdicts.json", verdicts_json(verdicts));
    }
    const bool ok = all_pass(verdicts);
    std::cout << (ok ? "all checks passed\n" : "some checks failed\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted harmonic map heat flow on the flat 3-torus"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", o.config, "Config file");
        if (need_config) c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--seed", o.seed, "Seed for sampled seminorms")->each([&](const std::string&) { o.seed_set = true; });
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto* run_cmd = app.add_subcommand("run", "Integrate the flow and write snapshots, series and summary");
    common(run_cmd, true);
    auto* gal_cmd = app.add_subcommand("galerkin", "Assemble and integrate the linearized Galerkin system");
    common(gal_cmd, true);
    auto* ana_cmd = app.add_subcommand("analyze", "Analyze the snapshots of a finished run");
    common(ana_cmd, false);
    ana_cmd->add_option("dir", o.run_dir, "Run directory")->required();
    auto* ver_cmd = app.add_subcommand("verify", "Run every acceptance check and print the verdict table");
    common(ver_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (ana_cmd->parsed() && ana_cmd->count("--out") == 0) o.out.clear();
    if (ver_cmd->parsed() && ver_cmd->count("--out") == 0) o.out.clear();
    Eigen::setNbThreads(o.threads);

    try {
        if (run_cmd->parsed()) return cmd_run(o);
        if (gal_cmd->parsed()) return cmd_galerkin(o);
        if (ana_cmd->parsed()) return cmd_analyze(o);
        return cmd_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
