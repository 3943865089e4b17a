#include "singflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <type_traits>

extern char** environ;

namespace singflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool to_double(const std::string& v, double& out) {
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return !v.empty() && end && *end == '\0' && std::isfinite(out);
}

bool to_long(const std::string& v, long long& out) {
    char* end = nullptr;
    out = std::strtoll(v.c_str(), &end, 10);
    return !v.empty() && end && *end == '\0';
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Setter {
    std::function<bool(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Sec>
Setter real_key(Sec RunConfig::*sec, double Sec::*field) {
    return {[=](RunConfig& c, const std::string& v) { return to_double(v, c.*sec.*field); },
            [=](const RunConfig& c) { return fmt(c.*sec.*field); }};
}

template <class Sec, class Int>
Setter int_key(Sec RunConfig::*sec, Int Sec::*field) {
    return {[=](RunConfig& c, const std::string& v) {
                long long x;
                if (!to_long(v, x) || (x < 0 && std::is_unsigned_v<Int>)) return false;
                c.*sec.*field = static_cast<Int>(x);
                return true;
            },
            [=](const RunConfig& c) { return std::to_string(c.*sec.*field); }};
}

const std::map<std::string, Setter>& key_table() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["grid.n"] = int_key(&RunConfig::grid, &GridConfig::n);
        t["grid.L"] = real_key(&RunConfig::grid, &GridConfig::L);

        t["curve.kind"] = {[](RunConfig& c, const std::string& v) {
                               c.curve.kind = v;
                               return true;
                           },
                           [](const RunConfig& c) { return c.curve.kind; }};
        t["curve.a"] = real_key(&RunConfig::curve, &CurveConfig::a);
        t["curve.b"] = real_key(&RunConfig::curve, &CurveConfig::b);
        t["curve.center"] = {[](RunConfig& c, const std::string& v) {
                                 std::stringstream ss(v);
                                 std::string part;
                                 int i = 0;
                                 while (std::getline(ss, part, ',')) {
                                     if (i >= 3 || !to_double(trim(part), c.curve.center[i])) return false;
                                     ++i;
                                 }
                                 return i == 3;
                             },
                             [](const RunConfig& c) {
                                 return fmt(c.curve.center[0]) + ", " + fmt(c.curve.center[1]) + ", " +
                                        fmt(c.curve.center[2]);
                             }};
        t["curve.radius"] = real_key(&RunConfig::curve, &CurveConfig::radius);
        t["curve.normal_axis"] = int_key(&RunConfig::curve, &CurveConfig::normal_axis);
        t["curve.samples"] = int_key(&RunConfig::curve, &CurveConfig::samples);

        t["weight.alpha"] = real_key(&RunConfig::weight, &WeightConfig::alpha);
        t["weight.solver_tolerance"] = real_key(&RunConfig::weight, &WeightConfig::solver_tolerance);
        t["weight.exclusion_radius"] = real_key(&RunConfig::weight, &WeightConfig::exclusion_radius);

        t["flow.initial"] = {[](RunConfig& c, const std::string& v) {
                                 try {
                                     c.flow.family = parse_family(v);
                                     return true;
                                 } catch (const std::exception&) {
                                     return false;
                                 }
                             },
                             [](const RunConfig& c) { return family_name(c.flow.family); }};
        t["flow.scheme"] = {[](RunConfig&, const std::string& v) { return v == "imex"; },
                            [](const RunConfig&) { return std::string("imex"); }};
        t["flow.c"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.params.c); },
                       [](const RunConfig& c) { return fmt(c.flow.params.c); }};
        t["flow.a"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.params.a); },
                       [](const RunConfig& c) { return fmt(c.flow.params.a); }};
        t["flow.b"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.params.b); },
                       [](const RunConfig& c) { return fmt(c.flow.params.b); }};
        t["flow.T"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.T_final); },
                       [](const RunConfig& c) { return fmt(c.flow.T_final); }};
        t["flow.dt"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.dt); },
                        [](const RunConfig& c) { return fmt(c.flow.dt); }};
        t["flow.cfl"] = {[](RunConfig& c, const std::string& v) { return to_double(v, c.flow.cfl); },
                         [](const RunConfig& c) { return fmt(c.flow.cfl); }};
        t["flow.snapshot_interval"] = {
            [](RunConfig& c, const std::string& v) { return to_double(v, c.flow.snapshot_interval); },
            [](const RunConfig& c) { return fmt(c.flow.snapshot_interval); }};

        t["analysis.theta_t0"] = real_key(&RunConfig::analysis, &AnalysisConfig::theta_t0);
        t["analysis.theta_t1"] = real_key(&RunConfig::analysis, &AnalysisConfig::theta_t1);
        t["analysis.convergence_t0"] = real_key(&RunConfig::analysis, &AnalysisConfig::convergence_t0);
        t["analysis.convergence_t1"] = real_key(&RunConfig::analysis, &AnalysisConfig::convergence_t1);
        t["analysis.seed"] = int_key(&RunConfig::analysis, &AnalysisConfig::seed);
        t["analysis.holder_pairs"] = int_key(&RunConfig::analysis, &AnalysisConfig::holder_pairs);
        t["analysis.holder_beta"] = real_key(&RunConfig::analysis, &AnalysisConfig::holder_beta);
        t["analysis.holder_gamma"] = real_key(&RunConfig::analysis, &AnalysisConfig::holder_gamma);
        t["analysis.shell_min"] = real_key(&RunConfig::analysis, &AnalysisConfig::shell_min);
        t["analysis.shell_max"] = real_key(&RunConfig::analysis, &AnalysisConfig::shell_max);
        t["analysis.rate_slack"] = real_key(&RunConfig::analysis, &AnalysisConfig::rate_slack);
        t["analysis.r2_min"] = real_key(&RunConfig::analysis, &AnalysisConfig::r2_min);
        t["analysis.bochner_T"] = real_key(&RunConfig::analysis, &AnalysisConfig::bochner_T);

        t["galerkin.N"] = int_key(&RunConfig::galerkin, &GalerkinConfig::N);
        t["galerkin.dt"] = real_key(&RunConfig::galerkin, &GalerkinConfig::dt);
        t["galerkin.T"] = real_key(&RunConfig::galerkin, &GalerkinConfig::T);
        t["galerkin.forcing"] = real_key(&RunConfig::galerkin, &GalerkinConfig::forcing);
        return t;
    }();
    return table;
}

const std::vector<std::string> kSections = {"grid", "curve", "weight", "flow", "analysis", "galerkin"};
const std::vector<std::string> kRequired = {"grid.n", "weight.alpha"};

void validate(const RunConfig& c, std::vector<std::string>& errors) {
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    need(c.grid.n >= 8, "grid.n must be at least 8");
    need(c.grid.L > 0, "grid.L must be positive");
    need(c.curve.kind == "axis_line" || c.curve.kind == "circle", "curve.kind must be axis_line or circle");
    if (c.curve.kind == "circle") {
        need(c.curve.radius > 0 && c.curve.radius < 0.5 * c.grid.L, "curve.radius must lie in (0, L/2)");
        need(c.curve.normal_axis >= 0 && c.curve.normal_axis <= 2, "curve.normal_axis must be 0, 1 or 2");
        need(c.curve.samples == 0 || c.curve.samples >= 8, "curve.samples must be 0 or at least 8");
    }
    need(c.weight.alpha > 1.0, "alpha must exceed 1 (the flow is only singular for alpha > 1)");
    need(c.weight.solver_tolerance > 0, "weight.solver_tolerance must be positive");
    need(c.weight.exclusion_radius >= 0, "weight.exclusion_radius must be non-negative");
    need(c.flow.T_final > 0, "flow.T must be positive");
    need(c.flow.dt >= 0, "flow.dt must be non-negative (0 selects the CFL policy)");
    need(c.flow.cfl > 0 && c.flow.cfl <= 1, "flow.cfl must lie in (0, 1]");
    need(c.flow.snapshot_interval > 0 && c.flow.snapshot_interval <= c.flow.T_final,
         "flow.snapshot_interval must lie in (0, T]");
    need(c.analysis.theta_t0 >= 0, "analysis.theta_t0 must be non-negative");
    need(c.analysis.holder_pairs > 0, "analysis.holder_pairs must be positive");
    need(c.analysis.rate_slack > 0 && c.analysis.rate_slack <= 1, "analysis.rate_slack must lie in (0, 1]");
    need(c.analysis.r2_min >= 0 && c.analysis.r2_min <= 1, "analysis.r2_min must lie in [0, 1]");
    need(c.analysis.bochner_T > 0, "analysis.bochner_T must be positive");
    need(c.galerkin.N >= 1, "galerkin.N must be at least 1");
    need(c.galerkin.dt > 0 && c.galerkin.T > 0, "galerkin.dt and galerkin.T must be positive");
    need(c.threads >= 1, "threads must be at least 1");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
          std::string s = "invalid configuration:";
          for (const auto& e : errors) s += "\n  " + e;
          return s;
      }()),
      errors_(std::move(errors)) {}

std::map<std::string, std::string> environment_overrides() {
    std::map<std::string, std::string> out;
    const std::string prefix = "SINGFLOW_";
    for (char** e = environ; e && *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind(prefix, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = lower(entry.substr(prefix.size(), eq - prefix.size()));
        const std::string value = entry.substr(eq + 1);
        for (const auto& sec : kSections) {
            if (name.rfind(sec + "_", 0) != 0) continue;
            const std::string key = name.substr(sec.size() + 1);
            // Match keys case-insensitively so SINGFLOW_FLOW_T reaches flow.T.
            for (const auto& kv : key_table())
                if (lower(kv.first) == sec + "." + key) out[kv.first] = value;
        }
    }
    return out;
}

RunConfig parse_config_text(const std::string& text, const std::map<std::string, std::string>& overrides) {
    RunConfig c;
    std::vector<std::string> errors;
    std::map<std::string, int> seen;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto& table = key_table();
    auto assign = [&](const std::string& full, const std::string& value, const std::string& where) {
        const auto it = table.find(full);
        if (it == table.end()) {
            errors.push_back(where + ": unknown key '" + full + "'");
            return;
        }
        if (!it->second.set(c, value)) errors.push_back(where + ": invalid value '" + value + "' for " + full);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                errors.push_back(where + ": unknown section [" + section + "]");
                section = "?";
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            errors.push_back(where + ": key outside of any section");
            continue;
        }
        if (section == "?") continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (auto it = seen.find(full); it != seen.end()) {
            errors.push_back("duplicate key '" + full + "' at lines " + std::to_string(it->second) + " and " +
                             std::to_string(lineno));
            continue;
        }
        seen[full] = lineno;
        assign(full, value, where);
    }
    for (const auto& kv : overrides) {
        seen.emplace(kv.first, 0);
        assign(kv.first, kv.second, "override SINGFLOW_" + kv.first);
    }
    for (const auto& r : kRequired)
        if (!seen.count(r)) errors.push_back("missing key '" + r + "'");
    validate(c, errors);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

RunConfig parse_config(const std::string& path, const std::map<std::string, std::string>& overrides) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    std::string current;
    for (const auto& sec : kSections) {
        os << "[" << sec << "]\n";
        for (const auto& kv : key_table()) {
            if (kv.first.rfind(sec + ".", 0) != 0) continue;
            os << kv.first.substr(sec.size() + 1) << " = " << kv.second.get(c) << "\n";
        }
        os << "\n";
    }
    return os.str();
}

CurveGamma make_curve(const RunConfig& c) {
    if (c.curve.kind == "axis_line") return CurveGamma::axis_line(c.curve.a, c.curve.b, c.grid.L);
    int samples = c.curve.samples;
    if (samples == 0) {
        const double s = c.grid.L / c.grid.n;
        samples = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * c.curve.radius / s)) + 1);
    }
    return CurveGamma::circle(c.curve.center, c.curve.radius, c.curve.normal_axis, c.grid.L, samples);
}

}  // namespace singflow
