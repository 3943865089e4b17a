// Acceptance driver: runs `singflow verify` on the shipped config, then re-checks every verdict
// against thresholds pinned here and prints one line per criterion.

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr double kLambda1 = 39.3517;  // first eigenvalue of the n = 32 grid Laplacian, L = 1
constexpr double kSlack = 0.8;

struct Rule {
    int criterion;
    std::function<bool(double m, double ref, double tol)> ok;
};

const std::map<std::string, Rule>& rules() {
    static const std::map<std::string, Rule> r = {
        {"gateaux_order", {1, [](double m, double, double) { return m >= 0.8 && m <= 1.2; }}},
        {"galerkin_matrices_vs_loops", {2, [](double m, double, double) { return m <= 1e-12; }}},
        {"galerkin_ode_vs_rk4", {2, [](double m, double, double) { return m <= 1e-6; }}},
        {"galerkin_weak_residual", {2, [](double m, double, double) { return m <= 1e-6; }}},
        {"energy_ratio_spread", {3, [](double m, double, double) { return m < 2.0; }}},
        {"hyperbolic_distance_bound",
         {4, [](double m, double ref, double tol) { return tol <= 1e-3 * (1 + ref) * (1 + 1e-12) && m <= ref + tol; }}},
        {"sup_phi2_bound", {4, [](double m, double ref, double tol) { return tol <= 1e-3 * (1 + ref) && m <= ref + tol; }}},
        {"bochner_violation_coarse", {5, [](double m, double ref, double) { return m <= ref && ref <= 10 * (1e-3 + 1.0 / 1024); }}},
        {"bochner_violation_fine", {5, [](double m, double ref, double) { return m <= ref && ref <= 10 * (1e-3 + 1.0 / 4096); }}},
        {"bochner_violation_shrinks", {5, [](double m, double ref, double) { return m <= ref; }}},
        {"theta_integral_monotone", {6, [](double m, double, double) { return m <= 1e-10; }}},
        {"theta_integral_rate",
         {6, [](double m, double ref, double) { return ref >= kSlack * 2 * kLambda1 - 1e-9 && m >= ref; }}},
        {"weighted_pointwise_rate",
         {6, [](double m, double ref, double) { return ref >= kSlack * kLambda1 / 2 - 1e-9 && m >= ref; }}},
        {"convergence_rate",
         {7, [](double m, double ref, double) { return ref >= kSlack * kLambda1 / 2 - 1e-9 && m >= ref; }}},
        {"steady_residual_final", {7, [](double m, double ref, double) { return m <= ref; }}},
        {"phi1_exponent", {8, [](double m, double, double) { return m >= 2 * 1.5 - 0.5; }}},
        {"grad_phi2_exponent", {8, [](double m, double, double) { return m >= -0.9; }}},
        {"regularity_slope_positive", {9, [](double m, double, double) { return m > 0; }}},
        {"regularity_small_sigma_exists", {9, [](double m, double ref, double) { return ref > 0 && m == ref; }}},
        {"harmonicity_order_16_32", {10, [](double m, double, double) { return std::fabs(m - 2.0) <= 0.3; }}},
        {"harmonicity_order_32_64", {10, [](double m, double, double) { return std::fabs(m - 2.0) <= 0.3; }}},
        {"log_h_over_log_rho", {10, [](double m, double, double) { return m >= 0.9 && m <= 1.1; }}},
        {"snapshot_round_trip", {11, [](double m, double, double) { return m == 0.0; }}},
        {"pipeline_deterministic", {11, [](double m, double, double) { return m == 0.0; }}},
    };
    return r;
}

const char* kNames[] = {"",
                        "operator consistency",
                        "galerkin oracle equivalence",
                        "energy estimate constant",
                        "maximum principle",
                        "bochner monotonicity",
                        "theta decay",
                        "convergence to the limit map",
                        "vanishing-order exponents",
                        "epsilon-regularity",
                        "weight construction",
                        "infrastructure"};

double value(const nlohmann::json& j) { return j.is_number() ? j.get<double>() : NAN; }

}  // namespace

int main() {
    const fs::path out = fs::temp_directory_path() / ("singflow_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(out);
    const std::string cmd = std::string("\"") + SINGFLOW_CLI + "\" verify --config \"" + SINGFLOW_ACCEPTANCE_CONFIG +
                            "\" --out \"" + out.string() + "\"";
    std::fflush(stdout);
    const int status = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

    nlohmann::json verdicts;
    {
        std::ifstream in(out / "verdicts.json");
        if (in) verdicts = nlohmann::json::parse(in, nullptr, false);
    }
    fs::remove_all(out);

    std::map<int, bool> pass;
    std::map<int, int> count;
    std::map<int, std::string> failed;
    for (int c = 1; c <= 11; ++c) pass[c] = true;
    std::map<std::string, bool> seen;
    if (verdicts.is_array())
        for (const auto& v : verdicts) {
            const std::string name = v.value("check_name", "");
            const auto it = rules().find(name);
            if (it == rules().end()) continue;
            seen[name] = true;
            const int c = it->second.criterion;
            const bool ok = v.value("pass", false) &&
                            it->second.ok(value(v["measured"]), value(v["reference"]), value(v["tolerance"]));
            ++count[c];
            if (!ok) {
                pass[c] = false;
                failed[c] += " " + name;
            }
        }
    for (const auto& [name, rule] : rules())
        if (!seen.count(name)) {
            pass[rule.criterion] = false;
            failed[rule.criterion] += " " + name + "(missing)";
        }
    if (exit_code != 0) {
        pass[11] = false;
        failed[11] += " verify_exit_code=" + std::to_string(exit_code);
    }

    bool all = true;
    std::printf("\n");
    for (int c = 1; c <= 11; ++c) {
        std::printf("%-4s criterion %2d  %-30s %d checks%s\n", pass[c] ? "PASS" : "FAIL", c, kNames[c], count[c],
                    failed[c].c_str());
        all = all && pass[c];
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILED");
    return all ? 0 : 1;
}
