#include "singflow/spectral.hpp"

#include "singflow/fft.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace singflow {

namespace {

bool lex_positive(const std::array<int, 3>& k) {
    for (int v : k)
        if (v != 0) return v > 0;
    return false;
}

// Columns of face gradients stacked as [x-faces; y-faces; z-faces].
Eigen::MatrixXd face_gradient_columns(const TorusGrid& grid, const Eigen::MatrixXd& cols) {
    const Eigen::Index n3 = grid.size();
    Eigen::MatrixXd out(3 * n3, cols.cols());
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
        const VectorField g = face_gradient(grid, cols.col(c).array());
        for (int a = 0; a < 3; ++a) out.col(c).segment(a * n3, n3) = g.col(a).matrix();
    }
    return out;
}

Eigen::VectorXd stack(const VectorField& v) {
    const Eigen::Index n3 = v.rows();
    Eigen::VectorXd out(3 * n3);
    for (int a = 0; a < 3; ++a) out.segment(a * n3, n3) = v.col(a).matrix();
    return out;
}

}  // namespace

SpectralBasis build_basis(const TorusGrid& grid, int N) {
    const int n = grid.n();
    const int hi = (n - 1) / 2, lo = -hi;
    struct Entry {
        double lam;
        std::array<int, 3> k;
    };
    std::vector<Entry> all;
    for (int a = lo; a <= hi; ++a)
        for (int b = lo; b <= hi; ++b)
            for (int c = lo; c <= hi; ++c) all.push_back({discrete_symbol(grid, a, b, c), {a, b, c}});
    if (N < 1 || N > static_cast<int>(all.size()))
        throw std::invalid_argument("basis size must lie in [1, number of resolved modes]");
    std::partial_sort(all.begin(), all.begin() + N, all.end(), [](const Entry& x, const Entry& y) {
        if (x.lam != y.lam) return x.lam < y.lam;
        return x.k < y.k;
    });

    SpectralBasis basis;
    basis.eigenvalues.resize(N);
    basis.discrete_eigenvalues.resize(N);
    basis.psi.resize(grid.size(), N);
    const double L = grid.length();
    const double vol = L * L * L;
    for (int m = 0; m < N; ++m) {
        const auto k = all[m].k;
        basis.wave_vectors.push_back(k);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        basis.eigenvalues[m] = 4.0 * std::numbers::pi * std::numbers::pi * k2 / (L * L);
        basis.discrete_eigenvalues[m] = all[m].lam;
        if (k2 == 0) {
            basis.psi.col(m).setConstant(1.0 / std::sqrt(vol));
            continue;
        }
        const bool cosine = lex_positive(k);
        const double sgn = cosine ? 1.0 : -1.0;
        const double amp = std::sqrt(2.0 / vol);
        for (Eigen::Index q = 0; q < grid.size(); ++q) {
            const Point p = grid.node(q);
            const double ph = 2.0 * std::numbers::pi * sgn * (k[0] * p[0] + k[1] * p[1] + k[2] * p[2]) / L;
            basis.psi(q, m) = amp * (cosine ? std::cos(ph) : std::sin(ph));
        }
    }
    return basis;
}

WeightedBasis build_weighted_basis(const SpectralBasis& basis, const WeightField& w, const Field& phi0_2) {
    WeightedBasis wb;
    wb.log_weight = log_target_weight(w, phi0_2);
    wb.weight = wb.log_weight.exp();
    const Eigen::VectorXd scale = (-0.5 * wb.log_weight).exp().matrix();
    wb.psi1 = scale.asDiagonal() * basis.psi;
    return wb;
}

FieldPair Forcing::at(double t, Eigen::Index size) const {
    FieldPair f{Field::Zero(size), Field::Zero(size)};
    for (const auto& term : terms) {
        const double a = term.time(t);
        if (term.space1.size()) f.first += a * term.space1;
        if (term.space2.size()) f.second += a * term.space2;
    }
    return f;
}

Eigen::VectorXd GalerkinSystem::load(double t) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * N);
    for (std::size_t r = 0; r < term_time.size(); ++r) {
        const double a = term_time[r](t);
        f.head(N) += a * term_loads1[r];
        f.tail(N) += a * term_loads2[r];
    }
    return f;
}

Eigen::MatrixXd GalerkinSystem::system_matrix() const {
    Eigen::MatrixXd K(2 * N, 2 * N);
    K << A, B, D, C;
    return K;
}

GalerkinSystem assemble_galerkin(const TorusGrid& grid, const Field& phi0_1, [[maybe_unused]] const Field& phi0_2,
                                 [[maybe_unused]] const WeightField& w, const SpectralBasis& basis,
                                 const WeightedBasis& wb, const Forcing& forcing) {
    // phi0_2 and w enter through the weighted basis.
    const int N = basis.size();
    const double dv = grid.cell_volume();
    const Eigen::Index n3 = grid.size();
    GalerkinSystem sys;
    sys.N = N;

    const VectorField g1 = gradient(grid, phi0_1);
    const Field grad1_sq = g1.square().rowwise().sum();
    const Eigen::VectorXd wface = stack(face_weight(grid, wb.log_weight));
    const Eigen::MatrixXd wpsi1 = wb.weight.matrix().asDiagonal() * wb.psi1;

    const Eigen::MatrixXd d1 = face_gradient_columns(grid, wb.psi1);
    sys.A = dv * d1.transpose() * wface.asDiagonal() * d1;

    Eigen::MatrixXd drift2(n3, N), drift1(n3, N);
    for (int l = 0; l < N; ++l) {
        const VectorField gp2 = gradient(grid, basis.psi.col(l).array());
        const VectorField gp1 = gradient(grid, wb.psi1.col(l).array());
        drift2.col(l) = (2.0 * (g1 * gp2).rowwise().sum()).matrix();
        drift1.col(l) = (-2.0 * wb.weight * (g1 * gp1).rowwise().sum()).matrix();
    }
    sys.B = dv * wpsi1.transpose() * drift2;
    sys.D = dv * basis.psi.transpose() * drift1;

    const Eigen::MatrixXd d2 = face_gradient_columns(grid, basis.psi);
    const Eigen::VectorXd react = (2.0 * wb.weight * grad1_sq).matrix();
    sys.C = dv * basis.psi.transpose() * react.asDiagonal() * basis.psi + dv * d2.transpose() * d2;

    for (const auto& term : forcing.terms) {
        Eigen::VectorXd l1 = Eigen::VectorXd::Zero(N), l2 = Eigen::VectorXd::Zero(N);
        if (term.space1.size()) l1 = dv * wpsi1.transpose() * term.space1.matrix();
        if (term.space2.size()) l2 = dv * basis.psi.transpose() * term.space2.matrix();
        sys.term_loads1.push_back(l1);
        sys.term_loads2.push_back(l2);
        sys.term_time.push_back(term.time);
    }
    return sys;
}

void integrate_ode(GalerkinSystem& sys, double T, double dt) {
    if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("integrate_ode needs positive T and dt");
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    const int M = 2 * sys.N;
    const Eigen::MatrixXd K = sys.system_matrix();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M, M);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + 0.5 * dt * K);
    const Eigen::MatrixXd expl = I - 0.5 * dt * K;

    sys.times.resize(steps + 1);
    sys.coefficients.setZero(M, steps + 1);
    sys.loads.resize(M, steps + 1);
    sys.times[0] = 0.0;
    sys.loads.col(0) = sys.load(0.0);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t1 = dt * static_cast<double>(j + 1);
        sys.times[j + 1] = t1;
        sys.loads.col(j + 1) = sys.load(t1);
        const Eigen::VectorXd rhs =
            expl * sys.coefficients.col(j) + 0.5 * dt * (sys.loads.col(j) + sys.loads.col(j + 1));
        sys.coefficients.col(j + 1) = lu.solve(rhs);
        if (!sys.coefficients.col(j + 1).allFinite()) {
            std::ostringstream os;
            os << "non-finite Galerkin coefficients at step " << (j + 1);
            throw std::runtime_error(os.str());
        }
    }
}

FieldPair reconstruct(const SpectralBasis& basis, const WeightedBasis& wb, const Eigen::VectorXd& c) {
    const int N = basis.size();
    return {(wb.psi1 * c.head(N)).array(), (basis.psi * c.tail(N)).array()};
}

FieldPair reconstruct(const GalerkinSystem& sys, const SpectralBasis& basis, const WeightedBasis& wb,
                      std::size_t step) {
    return reconstruct(basis, wb, sys.coefficients.col(static_cast<Eigen::Index>(step)));
}

Eigen::VectorXd project(const TorusGrid& grid, const SpectralBasis& basis, const WeightedBasis& wb,
                        const FieldPair& k) {
    const int N = basis.size();
    const double dv = grid.cell_volume();
    const Eigen::MatrixXd wpsi1 = wb.weight.matrix().asDiagonal() * wb.psi1;
    const Eigen::MatrixXd g1 = dv * wpsi1.transpose() * wb.psi1;
    const Eigen::MatrixXd g2 = dv * basis.psi.transpose() * basis.psi;
    Eigen::VectorXd c(2 * N);
    c.head(N) = g1.ldlt().solve(dv * wpsi1.transpose() * k.first.matrix());
    c.tail(N) = g2.ldlt().solve(dv * basis.psi.transpose() * k.second.matrix());
    return c;
}

double weak_residual(const TorusGrid& grid, const Field& phi0_1, const Field& phi0_2, const WeightField& w,
                     const Forcing& forcing, const std::vector<double>& times,
                     const std::function<FieldPair(std::size_t)>& k_at, const std::vector<FieldPair>& tests) {
    if (times.empty() || tests.empty()) return 0.0;
    const Field lw = log_target_weight(w, phi0_2);
    const Field wt = lw.exp();
    const VectorField wf = face_weight(grid, lw);
    const VectorField g1 = gradient(grid, phi0_1);
    const Field grad1_sq = g1.square().rowwise().sum();
    const std::size_t T = tests.size();

    std::vector<VectorField> dz1(T), dz2(T);
    std::vector<Field> wz1(T);
    for (std::size_t i = 0; i < T; ++i) {
        dz1[i] = face_gradient(grid, tests[i].first);
        dz2[i] = face_gradient(grid, tests[i].second);
        wz1[i] = wt * tests[i].first;
    }

    auto evaluate = [&](std::size_t j, Eigen::ArrayXd& value, Eigen::ArrayXd& integrand) {
        const FieldPair k = k_at(j);
        const FieldPair f = forcing.at(times[j], grid.size());
        const VectorField fk1 = wf * face_gradient(grid, k.first);
        const VectorField dk2 = face_gradient(grid, k.second);
        const Field cross = 2.0 * (g1 * gradient(grid, k.second)).rowwise().sum() - f.first;
        const Field react = 2.0 * wt * grad1_sq * k.second -
                            2.0 * wt * (g1 * gradient(grid, k.first)).rowwise().sum() - f.second;
        for (std::size_t i = 0; i < T; ++i) {
            value[2 * i] = grid.inner(k.first, wz1[i]);
            value[2 * i + 1] = grid.inner(k.second, tests[i].second);
            integrand[2 * i] = grid.inner(fk1, dz1[i]) + grid.inner(cross, wz1[i]);
            integrand[2 * i + 1] = grid.inner(dk2, dz2[i]) + grid.inner(react, tests[i].second);
        }
    };

    Eigen::ArrayXd v0(2 * T), i0(2 * T), v(2 * T), in(2 * T);
    evaluate(0, v0, i0);
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(2 * T);
    Eigen::ArrayXd prev = i0;
    double worst = 0.0;
    for (std::size_t j = 1; j < times.size(); ++j) {
        evaluate(j, v, in);
        acc += 0.5 * (times[j] - times[j - 1]) * (prev + in);
        prev = in;
        worst = std::max(worst, (v - v0 + acc).abs().maxCoeff());
    }
    return worst;
}

EnergyEstimate energy_estimate(const TorusGrid& grid, const GalerkinSystem& sys, const SpectralBasis& basis,
                               const WeightedBasis& wb, const DistanceField& dist, double alpha,
                               const Forcing& forcing) {
    const int N = sys.N;
    const double dv = grid.cell_volume();
    const Field ra = dist.rho.pow(-alpha);
    const Eigen::MatrixXd s1 = ra.matrix().asDiagonal() * wb.psi1;
    const Eigen::MatrixXd d1 = face_gradient_columns(grid, s1);
    const Eigen::MatrixXd d2 = face_gradient_columns(grid, basis.psi);
    const Eigen::MatrixXd G0 = dv * s1.transpose() * s1;
    const Eigen::MatrixXd G1 = G0 + dv * d1.transpose() * d1;
    const Eigen::MatrixXd P0 = dv * basis.psi.transpose() * basis.psi;
    const Eigen::MatrixXd P1 = P0 + dv * d2.transpose() * d2;

    const std::size_t R = forcing.terms.size();
    const Field rf = dist.rho.pow(1.0 - alpha);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(R, R);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t q = 0; q < R; ++q) {
            const auto& a = forcing.terms[r];
            const auto& b = forcing.terms[q];
            double v = 0.0;
            if (a.space1.size() && b.space1.size()) v += grid.inner(Field(rf * a.space1), Field(rf * b.space1));
            if (a.space2.size() && b.space2.size()) v += grid.inner(a.space2, b.space2);
            Q(r, q) = v;
        }

    EnergyEstimate e;
    double peak = 0.0, grad_int = 0.0, f_int = 0.0, prev_g = 0.0, prev_f = 0.0;
    for (std::size_t j = 0; j < sys.times.size(); ++j) {
        const Eigen::VectorXd c1 = sys.coefficients.col(j).head(N);
        const Eigen::VectorXd c2 = sys.coefficients.col(j).tail(N);
        peak = std::max(peak, c1.dot(G0 * c1) + c2.dot(P0 * c2));
        const double g = c1.dot(G1 * c1) + c2.dot(P1 * c2);
        Eigen::VectorXd a(R);
        for (std::size_t r = 0; r < R; ++r) a[r] = forcing.terms[r].time(sys.times[j]);
        const double f = a.dot(Q * a);
        if (j > 0) {
            const double h = sys.times[j] - sys.times[j - 1];
            grad_int += 0.5 * h * (g + prev_g);
            f_int += 0.5 * h * (f + prev_f);
        }
        prev_g = g;
        prev_f = f;
    }
    e.lhs = peak + grad_int;
    e.rhs = f_int;
    return e;
}

double weighted_poincare_constant(const TorusGrid& grid, const WeightField& w, const WeightedBasis& wb) {
    const double dv = grid.cell_volume();
    const Field lw = -2.0 * w.alpha * w.log_h;
    const Eigen::VectorXd mass_w = (lw - 2.0 * w.log_h).exp().matrix();
    const Eigen::MatrixXd M = dv * wb.psi1.transpose() * mass_w.asDiagonal() * wb.psi1;
    const Eigen::MatrixXd d = face_gradient_columns(grid, wb.psi1);
    const Eigen::VectorXd wf = stack(face_weight(grid, lw));
    const Eigen::MatrixXd K = dv * d.transpose() * wf.asDiagonal() * d;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(M, K, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigenproblem failed");
    return es.eigenvalues().maxCoeff();
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "m,l,value\n";
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << i << ',' << j << ',' << buf << '\n';
        }
}

}  // namespace singflow
