#pragma once

#include "singflow/grid.hpp"

#include <complex>
#include <functional>
#include <memory>

namespace singflow {

// Diagonalizes the 7-point periodic Laplacian with real-to-complex FFTs.
// symbol() holds lambda(k) = (4/s^2) sum_i sin^2(pi k_i / n) >= 0 on the half spectrum,
// the eigenvalue of -laplacian for every Fourier mode.
class PeriodicSolver {
public:
    explicit PeriodicSolver(const TorusGrid& grid);
    ~PeriodicSolver();
    PeriodicSolver(const PeriodicSolver&) = delete;
    PeriodicSolver& operator=(const PeriodicSolver&) = delete;

    const TorusGrid& grid() const { return grid_; }
    const Eigen::ArrayXd& symbol() const { return symbol_; }

    // Multiplies every Fourier coefficient by g(lambda); g(0) is applied to the mean.
    Field apply(const Field& f, const std::function<double(double)>& g) const;

    // -lap u = rhs - mean(rhs), mean(u) = 0.
    Field solve_poisson(const Field& rhs) const;
    // (I - dt lap) u = rhs.
    Field solve_shifted(const Field& rhs, double dt) const;

    // Smallest nonzero eigenvalue of -laplacian.
    double first_eigenvalue() const;

private:
    void forward(const Field& f) const;
    Field backward() const;

    TorusGrid grid_;
    Eigen::ArrayXd symbol_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

// Eigenvalue of -laplacian for the wave vector k on the given grid.
double discrete_symbol(const TorusGrid& grid, int k1, int k2, int k3);

}  // namespace singflow
