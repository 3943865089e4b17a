#pragma once

#include "singflow/grid.hpp"

#include <vector>

namespace singflow {

// Distance on the flat torus of side L; inputs are wrapped into [0,L) first.
double periodic_distance(const Point& p, const Point& q, double L);

// Minimal-image displacement q - p on the torus.
Point periodic_displacement(const Point& p, const Point& q, double L);

enum class CurveKind { axis_line, circle };

class CurveGamma {
public:
    // The line {x1 = a, x2 = b}, closed through the x3 period.
    static CurveGamma axis_line(double a, double b, double L);
    // Circle of the given radius in the plane through center normal to normal_axis.
    static CurveGamma circle(const Point& center, double radius, int normal_axis, double L,
                             int sample_count);

    CurveKind kind() const { return kind_; }
    double length() const { return L_; }
    double a() const { return a_; }
    double b() const { return b_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    int normal_axis() const { return normal_axis_; }
    const std::vector<Point>& samples() const { return samples_; }

    // Largest distance between consecutive samples (periodic metric).
    double sample_spacing() const;

    struct Nearest {
        double distance = 0.0;
        double second = 0.0;      // distance through the next-closest branch
        Point gradient{0, 0, 0};  // unit gradient of the distance (zero on the curve)
        double axial_radius = 0;  // circle only: distance to the circle's symmetry axis
        Point foot{0, 0, 0};      // closest curve point, wrapped into [0,L)^3
    };
    Nearest nearest(const Point& x) const;
    double distance(const Point& x) const { return nearest(x).distance; }

    // Arc-length coordinate of the closest curve point.
    double arc_coordinate(const Point& x) const;
    double curve_length() const;

private:
    CurveKind kind_ = CurveKind::axis_line;
    double L_ = 1.0;
    double a_ = 0.5, b_ = 0.5;
    Point center_{0.5, 0.5, 0.5};
    double radius_ = 0.0;
    int normal_axis_ = 2;
    std::vector<Point> samples_;
};

struct DistanceField {
    Field rho;            // clamped distance
    Field raw;            // unclamped distance
    VectorField unit_gradient;
    Field ridge_gap;      // gap to the next branch; small values mark the cut locus
    Field axial_radius;   // circle only, zero otherwise
    double rho_min_clamp = 0.0;
    double spacing = 0.0;

    // Nodes whose cell touches the curve; phi1 is held at zero there.
    Mask pinned() const;
    // Nodes where the distance is not smooth (periodic ridge, circle axis).
    Mask cut_locus() const;
    // Nodes admitted to sup-type diagnostics: raw distance >= 2 spacing and off the cut locus.
    Mask admissible(double exclusion_radius = -1.0) const;
};

DistanceField distance_to_curve(const TorusGrid& grid, const CurveGamma& gamma);

// Along-curve component of the displacement from anchor (a point of the curve) to x.
double curve_projection_coordinate(const Point& x, const Point& anchor, const CurveGamma& gamma);

Field curve_projection_field(const TorusGrid& grid, const Point& anchor, const CurveGamma& gamma);

}  // namespace singflow
