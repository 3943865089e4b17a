#pragma once

#include "singflow/flow.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace singflow {

struct GridConfig {
    int n = 32;
    double L = 1.0;
};

struct CurveConfig {
    std::string kind = "axis_line";
    double a = 0.5;
    double b = 0.5;
    Point center{0.5, 0.5, 0.5};
    double radius = 0.25;
    int normal_axis = 2;
    int samples = 0;  // 0 picks the smallest count meeting the grid-spacing contract
};

struct WeightConfig {
    double alpha = 1.5;
    double solver_tolerance = 1e-10;
    double exclusion_radius = 0.0;  // 0 means 2 spacing
};

struct AnalysisConfig {
    double theta_t0 = 1.0;
    double theta_t1 = 0.0;        // 0 means T
    double convergence_t0 = 1.0;
    double convergence_t1 = 0.0;  // 0 means T/2
    std::uint64_t seed = 12345;
    std::size_t holder_pairs = 100000;
    double holder_beta = 0.5;
    double holder_gamma = 2.5;
    double shell_min = 0.0;  // 0 means 4 spacing
    double shell_max = 0.0;  // 0 means L/4
    double rate_slack = 0.8;
    double r2_min = 0.9;
    double bochner_T = 0.02;
};

struct GalerkinConfig {
    int N = 4;
    double dt = 1e-4;
    double T = 0.2;
    double forcing = 1.0;
};

struct RunConfig {
    GridConfig grid;
    CurveConfig curve;
    WeightConfig weight;
    FlowConfig flow;
    AnalysisConfig analysis;
    GalerkinConfig galerkin;
    int threads = 1;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

// SINGFLOW_<SECTION>_<KEY> variables from the process environment, keyed "section.key".
std::map<std::string, std::string> environment_overrides();

// Parses key = value lines under [section] headers. All problems are collected and thrown together.
RunConfig parse_config_text(const std::string& text, const std::map<std::string, std::string>& overrides = {});
RunConfig parse_config(const std::string& path, const std::map<std::string, std::string>& overrides = {});

// Canonical text form; parse_config_text(render_config(c)) reproduces c.
std::string render_config(const RunConfig& c);

CurveGamma make_curve(const RunConfig& c);

}  // namespace singflow
