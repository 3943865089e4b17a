#include "singflow/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace singflow;

namespace {

const char* kMinimal = "[grid]\nn = 16\n[weight]\nalpha = 1.5\n";

std::vector<std::string> errors_of(const std::string& text, const std::map<std::string, std::string>& ov = {}) {
    try {
        parse_config_text(text, ov);
    } catch (const ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
    const RunConfig c = parse_config_text(kMinimal);
    EXPECT_EQ(c.grid.n, 16);
    EXPECT_EQ(c.grid.L, 1.0);
    EXPECT_EQ(c.curve.kind, "axis_line");
    EXPECT_EQ(c.flow.T_final, 5.0);
    EXPECT_EQ(c.analysis.seed, 12345u);
    EXPECT_EQ(c.galerkin.N, 4);
}

TEST(Config, RenderRoundTrips) {
    RunConfig c = parse_config_text(
        "[grid]\nn = 24\nL = 2\n[curve]\nkind = circle\ncenter = 1, 1, 1\nradius = 0.3\nnormal_axis = 1\n"
        "[weight]\nalpha = 2.25\n[flow]\ninitial = trig\nb = 0.125\nT = 0.5\nsnapshot_interval = 0.05\n"
        "[analysis]\nseed = 99\n");
    const RunConfig d = parse_config_text(render_config(c));
    EXPECT_EQ(render_config(c), render_config(d));
    EXPECT_EQ(d.curve.center[0], 1.0);
    EXPECT_EQ(d.weight.alpha, 2.25);
    EXPECT_EQ(d.flow.family, InitialFamily::trig);
    EXPECT_EQ(d.analysis.seed, 99u);
}

TEST(Config, AlphaAtMostOneNamesTheConstraint) {
    const auto e = errors_of("[grid]\nn = 16\n[weight]\nalpha = 0.5\n");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_NE(e[0].find("alpha must exceed 1"), std::string::npos);
}

TEST(Config, DuplicateKeyListsBothLines) {
    const auto e = errors_of("[grid]\nn = 16\n\n[weight]\nalpha = 1.5\n[grid]\nn = 32\n");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_NE(e[0].find("grid.n"), std::string::npos);
    EXPECT_NE(e[0].find("lines 2 and 7"), std::string::npos);
}

TEST(Config, CollectsEveryError) {
    const auto e = errors_of("[grid]\nn = 4\nbogus = 1\n[weight]\nalpha = x\n[nowhere]\nk = 1\n[flow]\ncfl = 2\nno equals\n");
    EXPECT_TRUE(any_contains(e, "grid.n must be at least 8"));
    EXPECT_TRUE(any_contains(e, "unknown key 'grid.bogus'"));
    EXPECT_TRUE(any_contains(e, "invalid value 'x' for weight.alpha"));
    EXPECT_TRUE(any_contains(e, "unknown section [nowhere]"));
    EXPECT_TRUE(any_contains(e, "flow.cfl"));
    EXPECT_TRUE(any_contains(e, "line 10: expected key = value"));
    EXPECT_GE(e.size(), 6u);
}

TEST(Config, MissingRequiredKeys) {
    const auto e = errors_of("[flow]\nT = 1\n");
    EXPECT_TRUE(any_contains(e, "missing key 'grid.n'"));
    EXPECT_TRUE(any_contains(e, "missing key 'weight.alpha'"));
}

TEST(Config, CommentsAndWhitespaceAreIgnored) {
    const RunConfig c = parse_config_text("# header\n\n[grid]   \n  n=20   ; trailing\n[weight]\nalpha = 3 # note\n");
    EXPECT_EQ(c.grid.n, 20);
    EXPECT_EQ(c.weight.alpha, 3.0);
}

TEST(Config, OverridesTakePrecedenceAndAreValidated) {
    const RunConfig c = parse_config_text(kMinimal, {{"flow.T", "0.25"}, {"analysis.seed", "7"}});
    EXPECT_EQ(c.flow.T_final, 0.25);
    EXPECT_EQ(c.analysis.seed, 7u);
    EXPECT_TRUE(any_contains(errors_of(kMinimal, {{"weight.alpha", "1"}}), "alpha must exceed 1"));
    EXPECT_TRUE(any_contains(errors_of(kMinimal, {{"grid.nope", "1"}}), "unknown key"));
    // Overrides can supply a required key.
    EXPECT_EQ(parse_config_text("[grid]\nn = 16\n", {{"weight.alpha", "2"}}).weight.alpha, 2.0);
}

TEST(Config, EnvironmentVariablesMapToKeys) {
    ::setenv("SINGFLOW_FLOW_T", "0.75", 1);
    ::setenv("SINGFLOW_ANALYSIS_HOLDER_PAIRS", "500", 1);
    ::setenv("SINGFLOWX_GRID_N", "8", 1);
    const auto ov = environment_overrides();
    ::unsetenv("SINGFLOW_FLOW_T");
    ::unsetenv("SINGFLOW_ANALYSIS_HOLDER_PAIRS");
    ::unsetenv("SINGFLOWX_GRID_N");
    ASSERT_EQ(ov.count("flow.T"), 1u);
    EXPECT_EQ(ov.at("flow.T"), "0.75");
    EXPECT_EQ(ov.at("analysis.holder_pairs"), "500");
    EXPECT_EQ(ov.count("grid.n"), 0u);
}

TEST(Config, SnapshotIntervalMustFitInTheRun) {
    EXPECT_TRUE(any_contains(errors_of(std::string(kMinimal) + "[flow]\nT = 0.1\nsnapshot_interval = 0.2\n"),
                             "snapshot_interval"));
}

TEST(Config, MissingFileIsAnIoError) {
    EXPECT_THROW(parse_config("/nonexistent/config.ini"), std::runtime_error);
}
