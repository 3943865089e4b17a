#include "singflow/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace singflow {

namespace {
// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct PeriodicSolver::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    Eigen::Index spec_size = 0;
};

double discrete_symbol(const TorusGrid& grid, int k1, int k2, int k3) {
    // Sum in sorted order so permuted wave vectors give bit-identical values.
    std::array<int, 3> k{std::abs(k1), std::abs(k2), std::abs(k3)};
    std::sort(k.begin(), k.end());
    const double s = grid.spacing();
    double acc = 0.0;
    for (int v : k) {
        const double sn = std::sin(std::numbers::pi * v / grid.n());
        acc += sn * sn;
    }
    return 4.0 / (s * s) * acc;
}

PeriodicSolver::PeriodicSolver(const TorusGrid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
    const int n = grid.n();
    const int nh = n / 2 + 1;
    plans_->spec_size = static_cast<Eigen::Index>(n) * n * nh;
    symbol_.resize(plans_->spec_size);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < nh; ++k) {
                const int ki = i <= n / 2 ? i : i - n;
                const int kj = j <= n / 2 ? j : j - n;
                symbol_[(static_cast<Eigen::Index>(i) * n + j) * nh + k] = discrete_symbol(grid, ki, kj, k);
            }
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->real = fftw_alloc_real(grid.size());
    plans_->spec = fftw_alloc_complex(plans_->spec_size);
    // ESTIMATE keeps plan selection independent of timing, so results are reproducible.
    plans_->fwd = fftw_plan_dft_r2c_3d(n, n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_c2r_3d(n, n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
}

PeriodicSolver::~PeriodicSolver() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->bwd);
    fftw_free(plans_->real);
    fftw_free(plans_->spec);
}

void PeriodicSolver::forward(const Field& f) const {
    std::memcpy(plans_->real, f.data(), sizeof(double) * grid_.size());
    fftw_execute(plans_->fwd);
}

Field PeriodicSolver::backward() const {
    fftw_execute(plans_->bwd);
    Field out = Eigen::Map<const Field>(plans_->real, grid_.size());
    return out / static_cast<double>(grid_.size());
}

Field PeriodicSolver::apply(const Field& f, const std::function<double(double)>& g) const {
    forward(f);
    for (Eigen::Index q = 0; q < plans_->spec_size; ++q) {
        const double m = g(symbol_[q]);
        plans_->spec[q][0] *= m;
        plans_->spec[q][1] *= m;
    }
    return backward();
}

Field PeriodicSolver::solve_poisson(const Field& rhs) const {
    forward(rhs);
    plans_->spec[0][0] = 0.0;
    plans_->spec[0][1] = 0.0;
    for (Eigen::Index q = 1; q < plans_->spec_size; ++q) {
        const double m = 1.0 / symbol_[q];
        plans_->spec[q][0] *= m;
        plans_->spec[q][1] *= m;
    }
    return backward();
}

Field PeriodicSolver::solve_shifted(const Field& rhs, double dt) const {
    forward(rhs);
    for (Eigen::Index q = 0; q < plans_->spec_size; ++q) {
        const double m = 1.0 / (1.0 + dt * symbol_[q]);
        plans_->spec[q][0] *= m;
        plans_->spec[q][1] *= m;
    }
    return backward();
}

double PeriodicSolver::first_eigenvalue() const { return discrete_symbol(grid_, 1, 0, 0); }

}  // namespace singflow
