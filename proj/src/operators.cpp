#include "singflow/operators.hpp"

#include "singflow/weight.hpp"

#include <cmath>

namespace singflow {

namespace {

// Visits every node with the flat indices of its six periodic neighbours.
template <class F>
void for_each_stencil(const TorusGrid& grid, F&& f) {
    const int n = grid.n();
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    for (int i = 0; i < n; ++i) {
        const Eigen::Index ip = (i + 1) % n, im = (i + n - 1) % n;
        for (int j = 0; j < n; ++j) {
            const Eigen::Index jp = (j + 1) % n, jm = (j + n - 1) % n;
            for (int k = 0; k < n; ++k) {
                const Eigen::Index kp = (k + 1) % n, km = (k + n - 1) % n;
                const Eigen::Index c = i * nn + j * n + k;
                f(c, ip * nn + j * n + k, im * nn + j * n + k, i * nn + jp * n + k,
                  i * nn + jm * n + k, i * nn + j * n + kp, i * nn + j * n + km);
            }
        }
    }
}

}  // namespace

Field laplacian(const TorusGrid& grid, const Field& f) {
    Field out(grid.size());
    const double inv = 1.0 / (grid.spacing() * grid.spacing());
    for_each_stencil(grid, [&](auto c, auto xp, auto xm, auto yp, auto ym, auto zp, auto zm) {
        out[c] = (f[xp] + f[xm] + f[yp] + f[ym] + f[zp] + f[zm] - 6.0 * f[c]) * inv;
    });
    return out;
}

VectorField gradient(const TorusGrid& grid, const Field& f) {
    VectorField out(grid.size(), 3);
    const double inv = 0.5 / grid.spacing();
    for_each_stencil(grid, [&](auto c, auto xp, auto xm, auto yp, auto ym, auto zp, auto zm) {
        out(c, 0) = (f[xp] - f[xm]) * inv;
        out(c, 1) = (f[yp] - f[ym]) * inv;
        out(c, 2) = (f[zp] - f[zm]) * inv;
    });
    return out;
}

Field centered_divergence(const TorusGrid& grid, const VectorField& v) {
    Field out(grid.size());
    const double inv = 0.5 / grid.spacing();
    for_each_stencil(grid, [&](auto c, auto xp, auto xm, auto yp, auto ym, auto zp, auto zm) {
        out[c] = ((v(xp, 0) - v(xm, 0)) + (v(yp, 1) - v(ym, 1)) + (v(zp, 2) - v(zm, 2))) * inv;
    });
    return out;
}

VectorField face_gradient(const TorusGrid& grid, const Field& f) {
    VectorField out(grid.size(), 3);
    const double inv = 1.0 / grid.spacing();
    for_each_stencil(grid, [&](auto c, auto xp, auto, auto yp, auto, auto zp, auto) {
        out(c, 0) = (f[xp] - f[c]) * inv;
        out(c, 1) = (f[yp] - f[c]) * inv;
        out(c, 2) = (f[zp] - f[c]) * inv;
    });
    return out;
}

Field face_divergence(const TorusGrid& grid, const VectorField& v) {
    Field out(grid.size());
    const double inv = 1.0 / grid.spacing();
    for_each_stencil(grid, [&](auto c, auto, auto xm, auto, auto ym, auto, auto zm) {
        out[c] = ((v(c, 0) - v(xm, 0)) + (v(c, 1) - v(ym, 1)) + (v(c, 2) - v(zm, 2))) * inv;
    });
    return out;
}

VectorField face_weight(const TorusGrid& grid, const Field& log_w) {
    VectorField out(grid.size(), 3);
    for_each_stencil(grid, [&](auto c, auto xp, auto, auto yp, auto, auto zp, auto) {
        out(c, 0) = std::exp(0.5 * (log_w[c] + log_w[xp]));
        out(c, 1) = std::exp(0.5 * (log_w[c] + log_w[yp]));
        out(c, 2) = std::exp(0.5 * (log_w[c] + log_w[zp]));
    });
    return out;
}

Field weighted_divergence(const TorusGrid& grid, const Field& log_w, const Field& f) {
    return face_divergence(grid, face_weight(grid, log_w) * face_gradient(grid, f));
}

Field hessian_norm(const TorusGrid& grid, const Field& f) {
    const int n = grid.n();
    const double s = grid.spacing();
    const double inv2 = 1.0 / (s * s);
    const double inv4 = 0.25 / (s * s);
    Field out(grid.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                auto at = [&](int a, int b, int c) { return f[grid.index(i + a, j + b, k + c)]; };
                const double c0 = at(0, 0, 0);
                const double hxx = (at(1, 0, 0) - 2 * c0 + at(-1, 0, 0)) * inv2;
                const double hyy = (at(0, 1, 0) - 2 * c0 + at(0, -1, 0)) * inv2;
                const double hzz = (at(0, 0, 1) - 2 * c0 + at(0, 0, -1)) * inv2;
                const double hxy = (at(1, 1, 0) - at(1, -1, 0) - at(-1, 1, 0) + at(-1, -1, 0)) * inv4;
                const double hxz = (at(1, 0, 1) - at(1, 0, -1) - at(-1, 0, 1) + at(-1, 0, -1)) * inv4;
                const double hyz = (at(0, 1, 1) - at(0, 1, -1) - at(0, -1, 1) + at(0, -1, -1)) * inv4;
                out[grid.index(i, j, k)] = std::sqrt(hxx * hxx + hyy * hyy + hzz * hzz +
                                                     2 * (hxy * hxy + hxz * hxz + hyz * hyz));
            }
    return out;
}

Field log_target_weight(const WeightField& w, const Field& phi2) {
    return -2.0 * w.alpha * w.log_h - 2.0 * phi2;
}

Field target_weight(const WeightField& w, const Field& phi2) { return log_target_weight(w, phi2).exp(); }

Field drift_term(const TorusGrid& grid, const Field& phi1, const Field& phi2, const WeightField& w) {
    const VectorField g1 = gradient(grid, phi1);
    const VectorField g2 = gradient(grid, phi2);
    return 2.0 * ((g2 + w.alpha * w.grad_log_h) * g1).rowwise().sum();
}

FieldPair P_residual(const TorusGrid& grid, const Field& phi1, const Field& phi2, const Field& dphi1_dt,
                     const Field& dphi2_dt, const WeightField& w) {
    const VectorField g1 = gradient(grid, phi1);
    const VectorField g2 = gradient(grid, phi2);
    const Field drift = 2.0 * ((g2 + w.alpha * w.grad_log_h) * g1).rowwise().sum();
    const Field source = target_weight(w, phi2) * g1.square().rowwise().sum();
    return {dphi1_dt - laplacian(grid, phi1) + drift, dphi2_dt - laplacian(grid, phi2) - source};
}

FieldPair P_residual_conservative(const TorusGrid& grid, const Field& phi1, const Field& phi2,
                                  const Field& dphi1_dt, const Field& dphi2_dt, const WeightField& w) {
    const Field lw = log_target_weight(w, phi2);
    const VectorField d = face_gradient(grid, phi1);
    const double inv = 1.0 / grid.spacing();
    // w^{-1} div(w grad phi1) with the ratios w_face / w_node formed in log space.
    Field op(grid.size());
    for_each_stencil(grid, [&](auto c, auto xp, auto xm, auto yp, auto ym, auto zp, auto zm) {
        const double l = lw[c];
        double acc = 0.0;
        acc += std::exp(0.5 * (lw[xp] - l)) * d(c, 0) - std::exp(0.5 * (lw[xm] - l)) * d(xm, 0);
        acc += std::exp(0.5 * (lw[yp] - l)) * d(c, 1) - std::exp(0.5 * (lw[ym] - l)) * d(ym, 1);
        acc += std::exp(0.5 * (lw[zp] - l)) * d(c, 2) - std::exp(0.5 * (lw[zm] - l)) * d(zm, 2);
        op[c] = acc * inv;
    });
    const VectorField g1 = gradient(grid, phi1);
    const Field source = lw.exp() * g1.square().rowwise().sum();
    return {dphi1_dt - op, dphi2_dt - laplacian(grid, phi2) - source};
}

FieldPair DP_apply(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2, const Field& k1,
                   const Field& k2, const WeightField& w, const Field& dk1_dt, const Field& dk2_dt) {
    const VectorField g1 = gradient(grid, phi0_1);
    const VectorField g2 = gradient(grid, phi0_2);
    const VectorField gk1 = gradient(grid, k1);
    const VectorField gk2 = gradient(grid, k2);
    const Field wt = target_weight(w, phi0_2);
    Field first = -laplacian(grid, k1) + 2.0 * ((g2 + w.alpha * w.grad_log_h) * gk1).rowwise().sum() +
                  2.0 * (g1 * gk2).rowwise().sum();
    Field second = -laplacian(grid, k2) + 2.0 * wt * g1.square().rowwise().sum() * k2 -
                   2.0 * wt * (g1 * gk1).rowwise().sum();
    if (dk1_dt.size() == first.size()) first += dk1_dt;
    if (dk2_dt.size() == second.size()) second += dk2_dt;
    return {first, second};
}

}  // namespace singflow
