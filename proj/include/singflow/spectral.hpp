#pragma once

#include "singflow/grid.hpp"
#include "singflow/operators.hpp"
#include "singflow/weight.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace singflow {

// Real Fourier eigenfunctions of the discrete -laplacian with unit grid-L2 norm.
// Wave vector k = 0 is the constant, lexicographically positive k gives a cosine and
// lexicographically negative k gives sin(2 pi (-k).x / L). Modes with a Nyquist component are skipped.
struct SpectralBasis {
    std::vector<std::array<int, 3>> wave_vectors;
    Eigen::VectorXd eigenvalues;           // continuum 4 pi^2 |k|^2 / L^2
    Eigen::VectorXd discrete_eigenvalues;  // exact eigenvalues of -laplacian on the grid
    Eigen::MatrixXd psi;                   // one column per mode

    int size() const { return static_cast<int>(wave_vectors.size()); }
};

SpectralBasis build_basis(const TorusGrid& grid, int N);

// psi1_m = h^alpha e^{phi0_2} psi2_m.
struct WeightedBasis {
    Eigen::MatrixXd psi1;
    Field weight;  // h^{-2 alpha} e^{-2 phi0_2}
    Field log_weight;
};

WeightedBasis build_weighted_basis(const SpectralBasis& basis, const WeightField& w, const Field& phi0_2);

// Right-hand side f(x,t) = sum_r time_r(t) (space1_r, space2_r).
struct Forcing {
    struct Term {
        Field space1;
        Field space2;
        std::function<double(double)> time;
    };
    std::vector<Term> terms;

    FieldPair at(double t, Eigen::Index size) const;
};

struct GalerkinSystem {
    int N = 0;
    Eigen::MatrixXd A, B, C, D;
    // Loads of each forcing term; F(t) = sum_r time_r(t) term_loads[r].
    std::vector<Eigen::VectorXd> term_loads1, term_loads2;
    std::vector<std::function<double(double)>> term_time;

    // Filled by integrate_ode: coefficients (C^1; C^2) in columns, loads sampled on the same times.
    std::vector<double> times;
    Eigen::MatrixXd coefficients;
    Eigen::MatrixXd loads;

    Eigen::VectorXd load(double t) const;
    Eigen::MatrixXd system_matrix() const;
};

GalerkinSystem assemble_galerkin(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2,
                                 const WeightField& w, const SpectralBasis& basis, const WeightedBasis& wb,
                                 const Forcing& forcing);

// Implicit trapezoidal rule on the full 2N system with zero initial data.
void integrate_ode(GalerkinSystem& system, double T, double dt);

FieldPair reconstruct(const SpectralBasis& basis, const WeightedBasis& wb, const Eigen::VectorXd& coeffs);
FieldPair reconstruct(const GalerkinSystem& system, const SpectralBasis& basis, const WeightedBasis& wb,
                      std::size_t step);

// Coefficients of (k1, k2) in the two bases, using the weighted and plain Gram matrices.
Eigen::VectorXd project(const TorusGrid& grid, const SpectralBasis& basis, const WeightedBasis& wb,
                        const FieldPair& k);

// Largest defect of the two weak-solution identities over the test pairs and the time grid.
// Time integrals use the trapezoid rule on `times`; k_at(j) returns k at times[j].
double weak_residual(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2, const WeightField& w,
                     const Forcing& forcing, const std::vector<double>& times,
                     const std::function<FieldPair(std::size_t)>& k_at, const std::vector<FieldPair>& tests);

struct EnergyEstimate {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio() const { return lhs / rhs; }
};

// Squared form of the Galerkin energy estimate along an integrated trajectory:
// max_t(|rho^-a k1|^2 + |k2|^2) + int(|rho^-a k1|_H1^2 + |k2|_H1^2) against int(|rho^{1-a} f1|^2 + |f2|^2).
EnergyEstimate energy_estimate(const TorusGrid& grid, const GalerkinSystem& system, const SpectralBasis& basis,
                               const WeightedBasis& wb, const DistanceField& dist, double alpha,
                               const Forcing& forcing);

// Largest ratio of int k^2 h^{-2a-2} to int |grad k|^2 h^{-2a} over span{psi1_m}.
double weighted_poincare_constant(const TorusGrid& grid, const WeightField& w, const WeightedBasis& wb);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace singflow
