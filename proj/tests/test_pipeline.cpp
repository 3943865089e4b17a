#include "singflow/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace singflow;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& initial) {
    return parse_config_text("[grid]\nn = 16\n[weight]\nalpha = 1.5\n[flow]\ninitial = " + initial +
                             "\nT = 0.02\nsnapshot_interval = 0.005\n[analysis]\nholder_pairs = 500\n");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PipelineTest : public ::testing::Test {
protected:
    fs::path dir = fs::temp_directory_path() / "singflow_pipeline_test";
    void SetUp() override { fs::remove_all(dir); }
    void TearDown() override { fs::remove_all(dir); }
};

}  // namespace

TEST_F(PipelineTest, ZeroDataGivesAllZeroSeries) {
    Experiment ex(small_config("zero"));
    Trajectory tr = run(ex.flow(), ex.config().flow);
    const RunAnalysis a = analyze_run(ex, tr);
    write_run_outputs(dir.string(), ex, tr, a);
    std::istringstream csv(slurp(dir / "timeseries.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "t,H,theta_l2,max_abs_phi2,hyp_dist_to_init,residual1,residual2");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::getline(fields, cell, ',');
        while (std::getline(fields, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0) << line;
        ++rows;
    }
    EXPECT_EQ(rows, static_cast<int>(tr.series.size()));
    EXPECT_TRUE(fs::exists(dir / "summary.json"));
    EXPECT_TRUE(fs::exists(dir / "config.ini"));
    EXPECT_EQ(read_snapshot_dir((dir / "snapshots").string()).size(), 5u);
}

TEST_F(PipelineTest, OutputsAreByteIdenticalAcrossRuns) {
    const RunConfig cfg = small_config("poly_cutoff_trig");
    for (const char* name : {"a", "b"}) {
        Experiment ex(cfg);
        Trajectory tr = run(ex.flow(), cfg.flow);
        const RunAnalysis an = analyze_run(ex, tr);
        write_run_outputs((dir / name).string(), ex, tr, an);
    }
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file()) continue;
        ++files;
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / fs::relative(e.path(), dir / "a"))) << e.path();
    }
    EXPECT_GE(files, 10);
}

TEST_F(PipelineTest, SnapshotsReproduceTheRunSeries) {
    const RunConfig cfg = small_config("poly_cutoff_trig");
    Experiment ex(cfg);
    Trajectory tr = run(ex.flow(), cfg.flow);
    write_snapshots((dir / "snaps").string(), ex, tr);
    const auto snaps = read_snapshot_dir((dir / "snaps").string());
    ASSERT_EQ(snaps.size(), tr.snapshots.size());
    Trajectory back = trajectory_from_snapshots(ex, snaps);
    ASSERT_EQ(back.snapshots.size(), tr.snapshots.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const auto& a = tr.snapshots[i].state;
        const auto& b = back.snapshots[i].state;
        EXPECT_TRUE((a.phi1 == b.phi1).all());
        EXPECT_EQ(a.phi2_mean, b.phi2_mean);
        EXPECT_NEAR(back.series[i].H, tr.series[tr.snapshots[i].step].H, 1e-12 * (1 + tr.series[0].H));
    }
    const double run_change = tr.mean_change(tr.snapshots.front().step, tr.snapshots.back().step);
    EXPECT_NEAR(back.mean_change(0, snaps.size() - 1), run_change, 1e-14 * (1 + std::fabs(run_change)));
}

TEST_F(PipelineTest, MissingSnapshotDirectoryThrows) {
    EXPECT_THROW(read_snapshot_dir((dir / "nothing").string()), std::runtime_error);
    fs::create_directories(dir / "empty");
    EXPECT_THROW(read_snapshot_dir((dir / "empty").string()), std::runtime_error);
}

TEST(Pipeline, WindowsResolvePlaceholders) {
    const RunConfig c = small_config("zero");
    const Windows w = resolve_windows(c);
    EXPECT_EQ(w.theta_t1, c.flow.T_final);
    EXPECT_EQ(w.convergence_t1, 0.5 * c.flow.T_final);
    EXPECT_EQ(w.shell_min, 4.0 / 16);
    EXPECT_EQ(w.shell_max, 0.25);
    const auto s = regularity_sigmas(TorusGrid(32, 1.0));
    EXPECT_EQ(s, (std::vector<double>{0.125, 0.0625, 0.03125, 0.015625}));
}

TEST(Pipeline, ForcingProfilesRampAndHold) {
    Experiment ex(small_config("zero"));
    const Forcing ramp = standard_forcing(ex, 1.0, 0.2, 0);
    const Forcing hold = standard_forcing(ex, 1.0, 0.2, 1);
    for (const auto& term : ramp.terms) EXPECT_EQ(term.time(0.0), 0.0);
    for (const auto& term : hold.terms) EXPECT_EQ(term.time(0.0), 1.0);
    const FieldPair f = hold.at(0.1, ex.grid().size());
    EXPECT_GT(f.first.abs().maxCoeff(), 0.0);
    EXPECT_GT(f.second.abs().maxCoeff(), 0.0);
}

TEST(Pipeline, JsonNumbersMapNonFiniteToNull) {
    EXPECT_TRUE(number(INFINITY).is_null());
    EXPECT_TRUE(number(NAN).is_null());
    EXPECT_EQ(number(1.5).get<double>(), 1.5);
}
