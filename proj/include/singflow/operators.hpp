#pragma once

#include "singflow/grid.hpp"

namespace singflow {

struct WeightField;

struct FieldPair {
    Field first;
    Field second;
};

// 7-point periodic Laplacian.
Field laplacian(const TorusGrid& grid, const Field& f);

// Centered second-order differences.
VectorField gradient(const TorusGrid& grid, const Field& f);
// Negative adjoint of the centered gradient.
Field centered_divergence(const TorusGrid& grid, const VectorField& v);

// Forward differences, component a living on the face between node i and i + e_a.
VectorField face_gradient(const TorusGrid& grid, const Field& f);
// Negative adjoint of face_gradient: <face_gradient f, v> = -<f, face_divergence v>.
Field face_divergence(const TorusGrid& grid, const VectorField& v);

// Face values exp((log_w[i] + log_w[i+e_a]) / 2) of a positive nodal weight given by its log.
VectorField face_weight(const TorusGrid& grid, const Field& log_w);
// div(w grad f) built from the face pair; reduces to laplacian when w = 1.
Field weighted_divergence(const TorusGrid& grid, const Field& log_w, const Field& f);

// Second differences: entries (aa) and centered mixed (ab), as a Frobenius norm per node.
Field hessian_norm(const TorusGrid& grid, const Field& f);

// log of h^{-2 alpha} e^{-2 phi2}.
Field log_target_weight(const WeightField& w, const Field& phi2);
Field target_weight(const WeightField& w, const Field& phi2);

// 2 (grad phi2 + alpha grad log h) . grad phi1.
Field drift_term(const TorusGrid& grid, const Field& phi1, const Field& phi2, const WeightField& w);

// Residual of the flow written as P(phi) = 0, expanded drift form.
FieldPair P_residual(const TorusGrid& grid, const Field& phi1, const Field& phi2,
                     const Field& dphi1_dt, const Field& dphi2_dt, const WeightField& w);

// Same residual with the phi1 equation in divergence form, w^{-1} div(w grad phi1).
FieldPair P_residual_conservative(const TorusGrid& grid, const Field& phi1, const Field& phi2,
                                  const Field& dphi1_dt, const Field& dphi2_dt, const WeightField& w);

// Derivative of P_residual at phi0 in the direction k. Passing empty time derivatives
// evaluates the spatial operator only.
FieldPair DP_apply(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2, const Field& k1,
                   const Field& k2, const WeightField& w, const Field& dk1_dt = Field(),
                   const Field& dk2_dt = Field());

}  // namespace singflow
