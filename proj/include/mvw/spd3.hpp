#pragma once

#include "mvw/manifold.hpp"
#include "mvw/sym3.hpp"

namespace mvw {

/// 3x3 symmetric positive definite matrices with the affine-invariant
/// metric <U, V>_P = tr(P^-1 U P^-1 V). Tangent vectors are symmetric
/// matrices. On disk a point is the six upper-triangle entries
/// (xx, xy, xz, yy, yz, zz).
class Spd3 {
public:
    using Point = Eigen::Matrix3d;
    using Vec = Eigen::Matrix3d;
    static constexpr int kMaxDim = 6;

    int dim() const { return 6; }
    std::string tag() const { return "SPD3"; }
    int rowWidth() const { return 6; }

    Vec zero(const Point&) const { return Vec::Zero(); }
    double inner(const Point& p, const Vec& v, const Vec& w) const;
    double norm(const Point& p, const Vec& v) const;

    Point exp(const Point& p, const Vec& v) const;
    Vec log(const Point& p, const Point& q) const;
    double dist(const Point& p, const Point& q) const;
    Point geodesicPoint(const Point& p, const Point& q, double t) const;
    Vec transport(const Point& p, const Point& q, const Vec& v) const;
    JacobiFrame<Spd3> jacobiFrame(const Point& p, const Point& q) const;
    std::vector<Vec> basis(const Point& p) const;

    bool isValid(const Point& p, double tol = kUnitNormTolerance) const;
    std::vector<double> toRow(const Point& p) const;
    Point fromRow(std::span<const double> row) const;

    /// Symmetric matrix from upper-triangle entries (xx, xy, xz, yy, yz, zz).
    static Eigen::Matrix3d fromUpper(std::span<const double> e);
};

}  // namespace mvw
