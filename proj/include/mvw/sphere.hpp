#pragma once

#include <Eigen/Dense>

#include "mvw/manifold.hpp"

namespace mvw {

/// The unit 2-sphere embedded in R^3. Tangent vectors at p are ambient
/// 3-vectors orthogonal to p.
class Sphere {
public:
    using Point = Eigen::Vector3d;
    using Vec = Eigen::Vector3d;
    static constexpr int kMaxDim = 2;

    int dim() const { return 2; }
    std::string tag() const { return "S2"; }
    int rowWidth() const { return 3; }

    Vec zero(const Point&) const { return Vec::Zero(); }
    double inner(const Point&, const Vec& v, const Vec& w) const { return v.dot(w); }
    double norm(const Point&, const Vec& v) const { return v.norm(); }

    Point exp(const Point& p, const Vec& v) const;
    /// Throws CutLocus when q = -p.
    Vec log(const Point& p, const Point& q) const;
    double dist(const Point& p, const Point& q) const;
    Point geodesicPoint(const Point& p, const Point& q, double t) const;
    Vec transport(const Point& p, const Point& q, const Vec& v) const;
    JacobiFrame<Sphere> jacobiFrame(const Point& p, const Point& q) const;
    std::vector<Vec> basis(const Point& p) const;

    static Vec project(const Point& p, const Vec& v) { return v - p.dot(v) * p; }

    bool isValid(const Point& p, double tol = kUnitNormTolerance) const;
    std::vector<double> toRow(const Point& p) const { return {p[0], p[1], p[2]}; }
    /// Rejects rows whose norm is off by more than 1e-6, renormalizes the rest.
    Point fromRow(std::span<const double> row) const;
};

}  // namespace mvw
