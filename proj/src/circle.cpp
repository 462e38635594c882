#include "mvw/circle.hpp"

#include <cmath>

namespace mvw {

using std::numbers::pi;

double Circle::wrap(double angle) {
    double r = std::remainder(angle, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

double Circle::norm(const Point&, Vec v) const { return std::abs(v); }

Circle::Vec Circle::log(const Point& p, const Point& q) const {
    const double d = wrap(q - p);
    if (d == pi) throw Error(ErrorCode::CutLocus, "circle log: antipodal points");
    return d;
}

double Circle::dist(const Point& p, const Point& q) const { return std::abs(wrap(q - p)); }

Circle::Point Circle::geodesicPoint(const Point& p, const Point& q, double t) const {
    const double d = log(p, q);
    if (d == 0.0) return p;
    return wrap(p + (d > 0 ? t : -t));
}

JacobiFrame<Circle> Circle::jacobiFrame(const Point& p, const Point& q) const {
    const double d = log(p, q);
    if (d == 0.0) throw Error(ErrorCode::DegenerateGeodesic, "circle jacobi frame: coincident points");
    return {p, std::abs(d), {{0.0, 1.0}}};
}

bool Circle::isValid(const Point& p, double) const {
    return std::isfinite(p) && p > -pi && p <= pi;
}

Circle::Point Circle::fromRow(std::span<const double> row) const {
    if (row.size() != 1 || !std::isfinite(row[0]))
        throw Error(ErrorCode::InvalidArgument, "S1 row needs one finite angle");
    return wrap(row[0]);
}

}  // namespace mvw
