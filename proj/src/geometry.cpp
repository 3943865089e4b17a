#include "singflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace singflow {

namespace {

double wrap_coord(double v, double L) {
    double r = std::fmod(v, L);
    return r < 0 ? r + L : r;
}

double wrapped_gap(double d, double L) {
    d = std::fabs(wrap_coord(d, L));
    return std::min(d, L - d);
}

}  // namespace

double periodic_distance(const Point& p, const Point& q, double L) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        double d = std::fabs(wrap_coord(p[i], L) - wrap_coord(q[i], L));
        d = std::min(d, L - d);
        s += d * d;
    }
    return std::sqrt(s);
}

Point periodic_displacement(const Point& p, const Point& q, double L) {
    Point d;
    for (int i = 0; i < 3; ++i) {
        double v = wrap_coord(q[i], L) - wrap_coord(p[i], L);
        if (v > 0.5 * L) v -= L;
        if (v < -0.5 * L) v += L;
        d[i] = v;
    }
    return d;
}

CurveGamma CurveGamma::axis_line(double a, double b, double L) {
    CurveGamma g;
    g.kind_ = CurveKind::axis_line;
    g.L_ = L;
    g.a_ = wrap_coord(a, L);
    g.b_ = wrap_coord(b, L);
    const int count = 256;
    for (int j = 0; j <= count; ++j) g.samples_.emplace_back(g.a_, g.b_, wrap_coord(L * j / count, L));
    return g;
}

CurveGamma CurveGamma::circle(const Point& center, double radius, int normal_axis, double L,
                              int sample_count) {
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    if (radius >= 0.5 * L)
        throw std::invalid_argument("circle radius must be below L/2 to avoid periodic self-overlap");
    if (normal_axis < 0 || normal_axis > 2) throw std::invalid_argument("normal_axis must be 0, 1 or 2");
    if (sample_count < 8) throw std::invalid_argument("circle needs at least 8 samples");
    CurveGamma g;
    g.kind_ = CurveKind::circle;
    g.L_ = L;
    g.center_ = center;
    g.radius_ = radius;
    g.normal_axis_ = normal_axis;
    const int u = (normal_axis + 1) % 3, v = (normal_axis + 2) % 3;
    for (int j = 0; j <= sample_count; ++j) {
        const double t = 2.0 * std::numbers::pi * (j % sample_count) / sample_count;
        Point p = center;
        p[u] += radius * std::cos(t);
        p[v] += radius * std::sin(t);
        for (int i = 0; i < 3; ++i) p[i] = wrap_coord(p[i], L);
        g.samples_.push_back(p);
    }
    return g;
}

double CurveGamma::sample_spacing() const {
    double m = 0.0;
    for (std::size_t j = 1; j < samples_.size(); ++j)
        m = std::max(m, periodic_distance(samples_[j - 1], samples_[j], L_));
    return m;
}

double CurveGamma::curve_length() const {
    return kind_ == CurveKind::axis_line ? L_ : 2.0 * std::numbers::pi * radius_;
}

CurveGamma::Nearest CurveGamma::nearest(const Point& xin) const {
    Point x;
    for (int i = 0; i < 3; ++i) x[i] = wrap_coord(xin[i], L_);
    Nearest best;
    best.distance = std::numeric_limits<double>::infinity();
    best.second = std::numeric_limits<double>::infinity();
    auto offer = [&](double d) {
        if (d < best.distance) {
            best.second = best.distance;
            best.distance = d;
            return true;
        }
        best.second = std::min(best.second, d);
        return false;
    };

    if (kind_ == CurveKind::axis_line) {
        for (int m1 = -1; m1 <= 1; ++m1)
            for (int m2 = -1; m2 <= 1; ++m2) {
                const double d1 = x[0] - a_ + m1 * L_;
                const double d2 = x[1] - b_ + m2 * L_;
                const double d = std::hypot(d1, d2);
                if (offer(d)) {
                    best.gradient = d > 0 ? Point(d1 / d, d2 / d, 0.0) : Point::Zero();
                    best.foot = Point(a_, b_, x[2]);
                }
            }
        return best;
    }

    const int ax = normal_axis_;
    for (int m1 = -1; m1 <= 1; ++m1)
        for (int m2 = -1; m2 <= 1; ++m2)
            for (int m3 = -1; m3 <= 1; ++m3) {
                Point d = x - center_ + L_ * Point(m1, m2, m3);
                const double z = d[ax];
                Point p = d;
                p[ax] = 0.0;
                const double q = p.norm();
                const double near = std::hypot(z, q - radius_);
                const double far = std::hypot(z, q + radius_);
                if (offer(near)) {
                    Point e = q > 0 ? Point(p / q) : Point::Zero();
                    if (q == 0) e[(ax + 1) % 3] = 1.0;
                    Point g = (q - radius_) * e;
                    g[ax] = z;
                    best.gradient = near > 0 ? Point(g / near) : Point::Zero();
                    best.axial_radius = q;
                    Point foot = center_ + radius_ * e;
                    for (int i = 0; i < 3; ++i) foot[i] = wrap_coord(foot[i], L_);
                    best.foot = foot;
                }
                offer(far);
            }
    return best;
}

double CurveGamma::arc_coordinate(const Point& x) const {
    if (kind_ == CurveKind::axis_line) return wrap_coord(x[2], L_);
    const Point foot = nearest(x).foot;
    const Point d = periodic_displacement(center_, foot, L_);
    const int u = (normal_axis_ + 1) % 3, v = (normal_axis_ + 2) % 3;
    double t = std::atan2(d[v], d[u]);
    if (t < 0) t += 2.0 * std::numbers::pi;
    return radius_ * t;
}

double curve_projection_coordinate(const Point& x, const Point& anchor, const CurveGamma& gamma) {
    if (gamma.kind() == CurveKind::axis_line) return wrapped_gap(x[2] - anchor[2], gamma.length());
    const double c = gamma.curve_length();
    double d = std::fabs(gamma.arc_coordinate(x) - gamma.arc_coordinate(anchor));
    return std::min(d, c - d);
}

Field curve_projection_field(const TorusGrid& grid, const Point& anchor, const CurveGamma& gamma) {
    return grid.sample([&](const Point& p) { return curve_projection_coordinate(p, anchor, gamma); });
}

DistanceField distance_to_curve(const TorusGrid& grid, const CurveGamma& gamma) {
    if (std::fabs(gamma.length() - grid.length()) > 1e-12 * grid.length())
        throw std::invalid_argument("curve and grid disagree on the domain length");
    if (gamma.kind() == CurveKind::circle && gamma.sample_spacing() > grid.spacing() * (1 + 1e-12))
        throw std::invalid_argument("circle sample spacing exceeds grid spacing");

    DistanceField df;
    const auto N = grid.size();
    df.raw.resize(N);
    df.rho.resize(N);
    df.unit_gradient.resize(N, 3);
    df.ridge_gap.resize(N);
    df.axial_radius = Field::Zero(N);
    df.spacing = grid.spacing();
    df.rho_min_clamp = 0.5 * grid.spacing();
    for (Eigen::Index q = 0; q < N; ++q) {
        const auto nb = gamma.nearest(grid.node(q));
        df.raw[q] = nb.distance;
        df.rho[q] = std::max(nb.distance, df.rho_min_clamp);
        df.unit_gradient.row(q) = nb.gradient.transpose().array();
        df.ridge_gap[q] = nb.second - nb.distance;
        df.axial_radius[q] = nb.axial_radius;
    }
    return df;
}

Mask DistanceField::pinned() const {
    return raw <= 0.5 * std::sqrt(3.0) * spacing;
}

Mask DistanceField::cut_locus() const {
    return ridge_gap < 2.0 * spacing;
}

Mask DistanceField::admissible(double exclusion_radius) const {
    const double r = std::max(2.0 * spacing, exclusion_radius);
    return (raw >= r) && !cut_locus();
}

}  // namespace singflow
