#include "singflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace singflow {

double energy_H(const TorusGrid& grid, const FlowState& s, const WeightField& w) {
    const Field phi2 = s.phi2();
    const VectorField wf = face_weight(grid, log_target_weight(w, phi2));
    const VectorField d1 = face_gradient(grid, s.phi1);
    const VectorField d2 = face_gradient(grid, s.phi2_dev);
    return ((wf * d1.square()).sum() + d2.square().sum()) * grid.cell_volume();
}

Field theta(const FlowState& s, const WeightField& w) {
    return target_weight(w, s.phi2()) * s.dphi1_dt.square() + s.dphi2_dt.square();
}

double l2_norm(const TorusGrid& grid, const Field& f) {
    const double m = f.abs().maxCoeff();
    if (m == 0.0 || !std::isfinite(m)) return m;
    return m * std::sqrt(grid.integrate((f / m).square()));
}

double cstar2_norm(const TorusGrid& grid, const Field& w1, const Field& w2, const DistanceField& dist,
                   double alpha) {
    const Mask keep = dist.raw >= 2.0 * dist.spacing;
    const Field r = dist.rho;
    const Field d1[3] = {w1.abs(), gradient(grid, w1).square().rowwise().sum().sqrt(), hessian_norm(grid, w1)};
    const Field d2[3] = {w2.abs(), gradient(grid, w2).square().rowwise().sum().sqrt(), hessian_norm(grid, w2)};
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Field v = d1[k] * r.pow(k + 1.5 - alpha) + d2[k] * r.pow(k + 1.5);
        double m = 0.0;
        for (Eigen::Index q = 0; q < v.size(); ++q)
            if (keep[q]) m = std::max(m, v[q]);
        total += m;
    }
    return total;
}

Field hyperbolic_distance(const Field& phi1, const Field& Phi2, const Field& phi1_0, const Field& Phi2_0) {
    return hyperbolic_distance_log(phi1, Phi2.log(), phi1_0, Phi2_0.log());
}

Field hyperbolic_distance_log(const Field& phi1, const Field& log_Phi2, const Field& phi1_0,
                              const Field& log_Phi2_0) {
    Field out(phi1.size());
    for (Eigen::Index q = 0; q < phi1.size(); ++q) {
        // Scale both points by 1/Phi2_0; the distance is invariant under this isometry.
        const double dx = (phi1[q] - phi1_0[q]) * std::exp(-log_Phi2_0[q]);
        const double e = std::expm1(log_Phi2[q] - log_Phi2_0[q]);  // Phi2/Phi2_0 - 1
        const double num = dx * dx + e * e;
        const double den = dx * dx + (2.0 + e) * (2.0 + e);
        out[q] = num == 0.0 ? 0.0 : 2.0 * std::atanh(std::sqrt(num / den));
    }
    return out;
}

LocalEnergy local_energy_E(const TorusGrid& grid, const FlowState& s, const WeightField& w, const Point& x,
                           double sigma, int m) {
    LocalEnergy le;
    const Field phi2 = s.phi2();
    const Field wt = target_weight(w, phi2);
    const Field ef = wt * gradient(grid, s.phi1).square().rowwise().sum() +
                     gradient(grid, s.phi2_dev).square().rowwise().sum();
    const Field eg = wt * s.dphi1_dt.square() + s.dphi2_dt.square();
    const double h = grid.spacing();
    const double L = grid.length();
    const double reach = sigma + 0.5 * std::sqrt(3.0) * h;
    const int span = static_cast<int>(std::ceil(reach / h)) + 1;
    const int ci = static_cast<int>(std::floor(x[0] / h)), cj = static_cast<int>(std::floor(x[1] / h)),
              ck = static_cast<int>(std::floor(x[2] / h));
    const double sub = 1.0 / m;
    double acc_f = 0.0, acc_g = 0.0;
    const int width = std::min(2 * span + 1, grid.n());
    const int start = -std::min(span, grid.n() / 2);
    for (int a = start; a < start + width; ++a)
        for (int b = start; b < start + width; ++b)
            for (int c = start; c < start + width; ++c) {
                const Point p = grid.node(ci + a, cj + b, ck + c);
                const Point d0 = periodic_displacement(x, p, L);
                if (d0.norm() > reach) continue;
                int inside = 0;
                for (int u = 0; u < m; ++u)
                    for (int v = 0; v < m; ++v)
                        for (int t = 0; t < m; ++t) {
                            const Point off((u + 0.5) * sub - 0.5, (v + 0.5) * sub - 0.5, (t + 0.5) * sub - 0.5);
                            if ((d0 + h * off).norm() <= sigma) ++inside;
                        }
                if (!inside) continue;
                const auto q = grid.index(ci + a, cj + b, ck + c);
                const double frac = static_cast<double>(inside) / (m * m * m);
                acc_f += frac * ef[q];
                acc_g += frac * eg[q];
            }
    le.f = acc_f * grid.cell_volume() / sigma;
    le.g = acc_g * grid.cell_volume() * sigma;
    le.E = le.f + le.g;
    return le;
}

double parabolic_distance(const Point& x, double s, const Point& y, double t, double L) {
    return std::max(periodic_distance(x, y, L), std::sqrt(std::fabs(s - t)));
}

std::vector<NormReport> weighted_space_norms(const TorusGrid& grid, const SpaceTimeSamples& u,
                                             const DistanceField& dist, double alpha, double gamma, double beta,
                                             std::size_t pairs, std::uint64_t seed) {
    std::vector<NormReport> out;
    const std::size_t T = u.values.size();
    const Field& r = dist.rho;

    // Sobolev part: terms i + 2j <= 2 with weight rho^{-a+1+i}, trapezoid in time.
    NormReport sob;
    sob.name = "W21_2";
    sob.weight_exponents = {1 - alpha, 2 - alpha, 3 - alpha};
    double total = 0.0;
    if (T >= 2) {
        std::vector<double> slice(T, 0.0);
        for (std::size_t j = 0; j < T; ++j) {
            const Field& f = u.values[j];
            const Field g = gradient(grid, f).square().rowwise().sum().sqrt();
            const Field hs = hessian_norm(grid, f);
            const std::size_t a = j == 0 ? 0 : j - 1, b = j + 1 == T ? j : j + 1;
            const Field ft = (u.values[b] - u.values[a]) / (u.times[b] - u.times[a]);
            slice[j] = grid.integrate((r.pow(1 - alpha) * f).square() + (r.pow(2 - alpha) * g).square() +
                                      (r.pow(3 - alpha) * hs).square() + (r.pow(1 - alpha) * ft).square());
        }
        for (std::size_t j = 1; j < T; ++j) total += 0.5 * (u.times[j] - u.times[j - 1]) * (slice[j] + slice[j - 1]);
    }
    sob.value = std::sqrt(total);
    out.push_back(sob);

    // Hoelder part on admissible nodes.
    const Mask keep = dist.admissible();
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index q = 0; q < keep.size(); ++q)
        if (keep[q]) nodes.push_back(q);
    NormReport sup{"holder_sup", 0.0, {2 - gamma}, 2 * dist.spacing, true};
    NormReport semi{"holder_seminorm", 0.0, {2 + beta - gamma}, 2 * dist.spacing, true};
    if (T > 0 && !nodes.empty()) {
        for (std::size_t j = 0; j < T; ++j)
            for (auto q : nodes) sup.value = std::max(sup.value, std::pow(r[q], 2 - gamma) * std::fabs(u.values[j][q]));
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick_t(0, T - 1), pick_x(0, nodes.size() - 1);
        for (std::size_t p = 0; p < pairs; ++p) {
            const std::size_t ta = pick_t(rng), tb = pick_t(rng);
            const auto xa = nodes[pick_x(rng)], xb = nodes[pick_x(rng)];
            if (ta == tb && xa == xb) continue;
            const double delta = parabolic_distance(grid.node(xa), u.times[ta], grid.node(xb), u.times[tb], grid.length());
            const double rxy = std::min(r[xa], r[xb]);
            const double v = std::pow(rxy, 2 + beta - gamma) * std::fabs(u.values[ta][xa] - u.values[tb][xb]) /
                             std::pow(delta, beta);
            semi.value = std::max(semi.value, v);
        }
    }
    out.push_back(sup);
    out.push_back(semi);
    return out;
}

}  // namespace singflow
