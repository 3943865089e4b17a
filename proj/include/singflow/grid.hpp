#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace singflow {

using Field = Eigen::ArrayXd;
using VectorField = Eigen::Array<double, Eigen::Dynamic, 3>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Point = Eigen::Vector3d;

// Cell-centered periodic grid on [0,L)^3. Node (i,j,k) sits at ((i+1/2)s, (j+1/2)s, (k+1/2)s)
// and is stored at (i*n + j)*n + k, so x3 varies fastest.
class TorusGrid {
public:
    TorusGrid(int n, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return spacing_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(n_) * n_ * n_; }
    double cell_volume() const { return spacing_ * spacing_ * spacing_; }

    Eigen::Index index(int i, int j, int k) const {
        return (static_cast<Eigen::Index>(wrap(i)) * n_ + wrap(j)) * n_ + wrap(k);
    }
    int wrap(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }
    void unravel(Eigen::Index idx, int& i, int& j, int& k) const {
        k = static_cast<int>(idx % n_);
        j = static_cast<int>((idx / n_) % n_);
        i = static_cast<int>(idx / (static_cast<Eigen::Index>(n_) * n_));
    }

    Point node(int i, int j, int k) const {
        return {(i + 0.5) * spacing_, (j + 0.5) * spacing_, (k + 0.5) * spacing_};
    }
    Point node(Eigen::Index idx) const {
        int i, j, k;
        unravel(idx, i, j, k);
        return node(i, j, k);
    }

    // Field of one coordinate of every node.
    Field coordinate(int axis) const;

    template <class F>
    Field sample(F&& f) const {
        Field out(size());
        for (Eigen::Index q = 0; q < size(); ++q) out[q] = f(node(q));
        return out;
    }

    // Cell-volume quadrature; summation order is fixed so results are reproducible.
    double integrate(const Field& f) const { return f.sum() * cell_volume(); }
    double inner(const Field& f, const Field& g) const { return (f * g).sum() * cell_volume(); }
    double inner(const VectorField& f, const VectorField& g) const {
        return (f * g).sum() * cell_volume();
    }
    double mean(const Field& f) const { return f.sum() / static_cast<double>(size()); }

private:
    int n_;
    double length_;
    double spacing_;
};

}  // namespace singflow
