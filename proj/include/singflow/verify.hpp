#pragma once

#include "singflow/pipeline.hpp"

#include <functional>
#include <string>
#include <vector>

namespace singflow {

struct Verdict {
    int criterion = 0;
    std::string check;
    bool pass = false;
    double measured = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

using LogFn = std::function<void(const std::string&)>;

// Dense Galerkin matrices by direct loops over nodes, sharing nothing with assemble_galerkin
// beyond the basis values.
struct GalerkinMatrices {
    Eigen::MatrixXd A, B, C, D;
};
GalerkinMatrices brute_force_matrices(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2,
                                      const WeightField& w, const SpectralBasis& basis);

// Classical RK4 on c' = F(t) - K c from zero, with `substeps` steps per interval of the system's
// time grid; returns the largest deviation from the stored coefficients.
double rk4_deviation(const GalerkinSystem& system, int substeps);

// Each group returns the verdicts of one acceptance criterion.
std::vector<Verdict> check_operator_consistency(const Experiment& ex, std::uint64_t seed);
std::vector<Verdict> check_galerkin_oracles(const Experiment& ex);
std::vector<Verdict> check_energy_estimate(const Experiment& ex);
std::vector<Verdict> check_standard_run(const Experiment& ex, const LogFn& log);  // criteria 4, 6, 7, 8, 9
std::vector<Verdict> check_bochner_refinement(const RunConfig& cfg, const LogFn& log);
std::vector<Verdict> check_weight_construction(const RunConfig& cfg);
std::vector<Verdict> check_infrastructure(const RunConfig& cfg);

// Every group in criterion order.
std::vector<Verdict> run_acceptance(const RunConfig& cfg, const LogFn& log = {});

bool all_pass(const std::vector<Verdict>& v);
nlohmann::json verdicts_json(const std::vector<Verdict>& v);
std::string verdict_table(const std::vector<Verdict>& v);

}  // namespace singflow
