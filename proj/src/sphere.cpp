#include "mvw/sphere.hpp"

#include <cmath>

namespace mvw {

Sphere::Point Sphere::exp(const Point& p, const Vec& v) const {
    const double n = v.norm();
    if (n < 1e-300) return p;
    const Point q = std::cos(n) * p + (std::sin(n) / n) * v;
    return q.normalized();
}

Sphere::Vec Sphere::log(const Point& p, const Point& q) const {
    const double c = p.dot(q);
    const Vec w = q - c * p;
    const double wn = w.norm();
    if (wn < 1e-15) {
        if (c > 0) return Vec::Zero();
        throw Error(ErrorCode::CutLocus, "sphere log: antipodal points");
    }
    return (std::atan2(wn, c) / wn) * w;
}

double Sphere::dist(const Point& p, const Point& q) const {
    return std::atan2(p.cross(q).norm(), p.dot(q));
}

Sphere::Point Sphere::geodesicPoint(const Point& p, const Point& q, double t) const {
    const Vec v = log(p, q);
    const double d = v.norm();
    if (d == 0.0) return p;
    return exp(p, (t / d) * v);
}

Sphere::Vec Sphere::transport(const Point& p, const Point& q, const Vec& v) const {
    const double denom = 1.0 + p.dot(q);
    if (denom < 1e-15) throw Error(ErrorCode::CutLocus, "sphere transport: antipodal points");
    return v - (q.dot(v) / denom) * (p + q);
}

JacobiFrame<Sphere> Sphere::jacobiFrame(const Point& p, const Point& q) const {
    const Vec v = log(p, q);
    const double d = v.norm();
    if (d == 0.0) throw Error(ErrorCode::DegenerateGeodesic, "sphere jacobi frame: coincident points");
    const Vec t = v / d;
    return {p, d, {{0.0, t}, {1.0, p.cross(t).normalized()}}};
}

std::vector<Sphere::Vec> Sphere::basis(const Point& p) const {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(p[i]) < std::abs(p[axis])) axis = i;
    const Vec e1 = project(p, Vec::Unit(axis)).normalized();
    return {e1, p.cross(e1)};
}

bool Sphere::isValid(const Point& p, double tol) const {
    return p.allFinite() && std::abs(p.norm() - 1.0) <= tol;
}

Sphere::Point Sphere::fromRow(std::span<const double> row) const {
    if (row.size() != 3) throw Error(ErrorCode::InvalidArgument, "S2 row needs three coordinates");
    const Point p(row[0], row[1], row[2]);
    if (!p.allFinite() || std::abs(p.norm() - 1.0) > 1e-6)
        throw Error(ErrorCode::InvalidArgument, "S2 row is not a unit vector");
    return p.normalized();
}

}  // namespace mvw
