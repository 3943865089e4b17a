#include "singflow/analysis.hpp"

#include "singflow/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace singflow {

namespace {

struct LineFit {
    double intercept = 0.0, slope = 0.0, r2 = 0.0, stderr_ = 0.0;
    int count = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const std::size_t n = x.size();
    f.count = static_cast<int>(n);
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        ssr += e * e;
    }
    f.r2 = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    f.stderr_ = (n > 2 && sxx > 0) ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace

BoundReport make_bound(std::string name, double lhs, double rhs, double tolerance) {
    BoundReport b;
    b.name = std::move(name);
    b.lhs = lhs;
    b.rhs = rhs;
    b.margin = rhs - lhs;
    b.tolerance = tolerance;
    b.pass = std::isfinite(lhs) && b.margin >= -tolerance;
    return b;
}

DecayReport fit_log_decay_rate(const std::vector<double>& t, const std::vector<double>& log_y, double t0,
                               double t1) {
    if (t.size() != log_y.size()) throw std::invalid_argument("series length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 - 1e-12 || t[i] > t1 + 1e-12) continue;
        if (!std::isfinite(log_y[i])) throw std::invalid_argument("fit window contains a non-positive value");
        xs.push_back(t[i]);
        ys.push_back(log_y[i]);
    }
    if (xs.size() < 10) throw std::invalid_argument("fit window holds fewer than 10 samples");
    const LineFit f = least_squares(xs, ys);
    DecayReport r;
    r.amplitude = std::exp(f.intercept);
    r.rate = -f.slope;
    r.r2 = f.r2;
    r.t0 = t0;
    r.t1 = t1;
    r.samples = f.count;
    return r;
}

DecayReport fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool inside = t[i] >= t0 - 1e-12 && t[i] <= t1 + 1e-12;
        if (inside && !(y[i] > 0)) throw std::invalid_argument("fit window contains a non-positive value");
        ly[i] = y[i] > 0 ? std::log(y[i]) : -std::numeric_limits<double>::infinity();
    }
    return fit_log_decay_rate(t, ly, t0, t1);
}

double first_eigenvalue(const TorusGrid& grid) { return discrete_symbol(grid, 1, 0, 0); }

MaxPrincipleReport check_max_principle(const Trajectory& traj, double L, double rel_tolerance) {
    MaxPrincipleReport r;
    r.G = traj.tension_max;
    r.diameter = std::sqrt(3.0) * L / 2.0;
    r.bound = r.G * r.diameter * r.diameter / 6.0;
    const double tol = rel_tolerance * (1.0 + r.bound);
    r.distance = make_bound("hyperbolic_distance_to_initial", traj.max_hyp_distance, r.bound, tol);
    r.phi2 = make_bound("sup_abs_phi2", traj.max_abs_phi2, traj.sup_abs_phi2_init + r.bound, tol);
    return r;
}

double bochner_violation(const TorusGrid& grid, const Field& theta_prev, const Field& theta_curr,
                         const Field& theta_next, double dt, const Mask& mask, double* scale) {
    const Field dth = (theta_next - theta_prev) / (2.0 * dt);
    const Field lap = laplacian(grid, theta_curr);
    double v = 0.0, sc = 0.0;
    for (Eigen::Index q = 0; q < mask.size(); ++q) {
        if (!mask[q]) continue;
        v = std::max(v, dth[q] - lap[q]);
        sc = std::max(sc, std::fabs(dth[q]));
    }
    if (scale) *scale = sc;
    return v;
}

BochnerReport bochner_check(const Trajectory& traj) {
    const double sm = std::isfinite(traj.bochner_signed_max) ? traj.bochner_signed_max : 0.0;
    return {traj.bochner_max, traj.bochner_scale, sm};
}

ThetaDecay theta_decay_check(const Trajectory& traj, double lambda1, double t0, double t1, double slack,
                             double r2_min) {
    ThetaDecay out;
    out.monotone = traj.theta_monotone;
    out.worst_increase = traj.theta_worst_increase;
    std::vector<double> t, ly, lw;
    bool any = false;
    for (const auto& d : traj.diagnostics) {
        t.push_back(d.t);
        ly.push_back(d.log_theta_sq);
        lw.push_back(d.weighted_dt_sup > 0 ? std::log(d.weighted_dt_sup) : -std::numeric_limits<double>::infinity());
        any = any || std::isfinite(d.log_theta_sq);
    }
    out.integral.quantity = "theta_sq_integral";
    out.pointwise.quantity = "weighted_time_derivative_sup";
    out.integral.reference_rate = 2.0 * lambda1;
    out.pointwise.reference_rate = 0.5 * lambda1;
    if (!any) {
        out.empty = true;
        out.integral.verdict = out.pointwise.verdict = "empty";
        return out;
    }
    auto fill = [&](DecayReport& dst, const std::vector<double>& series) {
        const double ref = dst.reference_rate;
        const std::string name = dst.quantity;
        try {
            dst = fit_log_decay_rate(t, series, t0, t1);
            dst.verdict = "fitted";
        } catch (const std::exception& e) {
            dst = DecayReport{};
            dst.verdict = e.what();
        }
        dst.quantity = name;
        dst.reference_rate = ref;
        dst.pass = dst.verdict == "fitted" && dst.r2 >= r2_min && dst.rate >= slack * ref;
    };
    fill(out.integral, ly);
    fill(out.pointwise, lw);
    return out;
}

ExponentFit exponent_fit(const Field& field, const DistanceField& dist, double r0, double r1, int shells) {
    if (!(r0 > 0) || !(r1 > r0)) throw std::invalid_argument("shell range must satisfy 0 < r0 < r1");
    const Mask cut = dist.cut_locus();
    ExponentFit fit;
    std::vector<double> lx, ly;
    for (int k = 0; k < shells; ++k) {
        const double a = r0 * std::pow(r1 / r0, double(k) / shells);
        const double b = r0 * std::pow(r1 / r0, double(k + 1) / shells);
        int count = 0;
        double m = -1.0, at = 0.0;
        for (Eigen::Index q = 0; q < field.size(); ++q) {
            if (cut[q] || dist.raw[q] < a || dist.raw[q] >= b) continue;
            ++count;
            if (std::fabs(field[q]) > m) {
                m = std::fabs(field[q]);
                at = dist.raw[q];
            }
        }
        if (count < 8) throw std::invalid_argument("shell holds fewer than 8 nodes");
        if (!(m > 0)) continue;
        fit.radii.push_back(at);
        fit.maxima.push_back(m);
        lx.push_back(std::log(at));
        ly.push_back(std::log(m));
    }
    const LineFit f = least_squares(lx, ly);
    fit.slope = f.slope;
    fit.stderr_ = f.stderr_;
    fit.shells = f.count;
    return fit;
}

std::vector<RegularityRow> epsilon_regularity_scan(const TorusGrid& grid, const FlowState& s, const WeightField& w,
                                                   const std::vector<Point>& centers,
                                                   const std::vector<double>& sigmas, int subdivisions) {
    std::vector<RegularityRow> rows;
    for (const auto& c : centers) {
        RegularityRow row;
        row.center = c;
        row.sigmas = sigmas;
        std::vector<double> lx, ly;
        double largest_sigma = 0.0, e_largest = 0.0;
        for (double sg : sigmas) {
            const double e = local_energy_E(grid, s, w, c, sg, subdivisions).E;
            row.energies.push_back(e);
            if (sg > largest_sigma) {
                largest_sigma = sg;
                e_largest = e;
            }
            if (e > 0) {
                lx.push_back(std::log(sg));
                ly.push_back(std::log(e));
            }
        }
        row.slope = lx.size() >= 2 ? least_squares(lx, ly).slope : 0.0;
        for (std::size_t i = 0; i < sigmas.size(); ++i)
            if (row.energies[i] <= 0.1 * e_largest && e_largest > 0)
                row.sigma_small = row.sigma_small < 0 ? sigmas[i] : std::min(row.sigma_small, sigmas[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Point> curve_adjacent_centers(const TorusGrid& grid, const CurveGamma& gamma, const DistanceField& dist,
                                          int limit) {
    const Mask pin = dist.pinned();
    std::map<long long, Point> feet;
    const double quantum = grid.spacing() * 1e-6;
    for (Eigen::Index q = 0; q < pin.size(); ++q) {
        if (!pin[q]) continue;
        const Point x = grid.node(q);
        const auto nb = gamma.nearest(x);
        feet.emplace(std::llround(gamma.arc_coordinate(nb.foot) / quantum), nb.foot);
    }
    std::vector<Point> all;
    for (const auto& kv : feet) all.push_back(kv.second);
    if (static_cast<int>(all.size()) <= limit) return all;
    std::vector<Point> out;
    for (int i = 0; i < limit; ++i) out.push_back(all[(all.size() * i) / limit]);
    return out;
}

ConvergenceReport convergence_report(const FlowSolver& solver, const Trajectory& traj, double lambda1, double t0,
                                     double t1, double slack, double r2_min) {
    ConvergenceReport r;
    r.decay.quantity = "cstar2_distance_to_final";
    r.decay.reference_rate = 0.5 * lambda1;
    const auto& fin = traj.snapshots.back().state;
    r.residual = steady_residual(solver, fin);
    r.weighted_theta_half = weighted_theta_half(solver, fin);
    std::vector<double> t, y;
    bool all_zero = true;
    for (std::size_t i = 0; i < traj.snapshots.size() && i < traj.cstar2_to_final.size(); ++i) {
        t.push_back(traj.snapshots[i].state.t);
        y.push_back(traj.cstar2_to_final[i]);
        if (traj.cstar2_to_final[i] != 0.0) all_zero = false;
    }
    if (all_zero) {
        r.converged_at_start = true;
        r.decay.verdict = "converged at t=0";
        r.decay.pass = true;
        return r;
    }
    const double ref = r.decay.reference_rate;
    try {
        r.decay = fit_decay_rate(t, y, t0, t1);
        r.decay.verdict = "fitted";
    } catch (const std::exception& e) {
        r.decay = DecayReport{};
        r.decay.verdict = e.what();
    }
    r.decay.quantity = "cstar2_distance_to_final";
    r.decay.reference_rate = ref;
    r.decay.pass = r.decay.verdict == "fitted" && r.decay.r2 >= r2_min && r.decay.rate >= slack * ref;
    return r;
}

BoundReport barrier_check(const Field& u, const Field& rho, const Field& r, double gamma, double delta,
                          const Mask& mask, double bound) {
    double c = 0.0;
    for (Eigen::Index q = 0; q < u.size(); ++q) {
        if (!mask[q]) continue;
        const double b = std::pow(rho[q], gamma) + std::pow(rho[q], gamma - delta) * r[q] * r[q];
        c = std::max(c, std::fabs(u[q]) / b);
    }
    return make_bound("barrier_constant", c, bound, 0.0);
}

}  // namespace singflow
