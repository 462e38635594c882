#pragma once

#include <numbers>

#include "mvw/manifold.hpp"

namespace mvw {

/// The unit circle, points stored as angles in (-pi, pi].
class Circle {
public:
    using Point = double;
    using Vec = double;
    static constexpr int kMaxDim = 1;

    static double wrap(double angle);

    int dim() const { return 1; }
    std::string tag() const { return "S1"; }
    int rowWidth() const { return 1; }

    Vec zero(const Point&) const { return 0.0; }
    double inner(const Point&, Vec v, Vec w) const { return v * w; }
    double norm(const Point&, Vec v) const;

    Point exp(const Point& p, const Vec& v) const { return wrap(p + v); }
    /// Throws CutLocus when q is antipodal to p.
    Vec log(const Point& p, const Point& q) const;
    double dist(const Point& p, const Point& q) const;
    Point geodesicPoint(const Point& p, const Point& q, double t) const;
    Vec transport(const Point&, const Point&, const Vec& v) const { return v; }
    JacobiFrame<Circle> jacobiFrame(const Point& p, const Point& q) const;
    std::vector<Vec> basis(const Point&) const { return {1.0}; }

    bool isValid(const Point& p, double tol = kUnitNormTolerance) const;
    std::vector<double> toRow(const Point& p) const { return {p}; }
    Point fromRow(std::span<const double> row) const;
};

}  // namespace mvw
