#include "mvw/spd3.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mvw {

using sym3::Mat3;

namespace {

struct Whitening {
    Mat3 half;     // P^{1/2}
    Mat3 invHalf;  // P^{-1/2}
};

/// Loops usually whiten the same base point many times in a row, so the
/// last result is kept per thread.
const Whitening& whiten(const Mat3& p) {
    thread_local Mat3 lastInput = Mat3::Constant(std::numeric_limits<double>::quiet_NaN());
    thread_local Whitening last;
    if (p == lastInput) return last;
    const auto e = sym3::eigenSymmetric(p);
    last = {sym3::spectralApply(e, [](double x) { return std::sqrt(x); }),
            sym3::spectralApply(e, [](double x) { return 1.0 / std::sqrt(x); })};
    lastInput = p;
    return last;
}

Mat3 congruence(const Mat3& a, const Mat3& x) { return sym3::symmetrize(a * x * a.transpose()); }

// Basis of Sym(3) orthonormal for the Frobenius inner product.
Mat3 unitSym(int i, int j) {
    Mat3 e = Mat3::Zero();
    if (i == j) {
        e(i, i) = 1.0;
    } else {
        e(i, j) = e(j, i) = std::numbers::sqrt2 / 2.0;
    }
    return e;
}

Mat3 unitSym(const Eigen::Vector3d& a, const Eigen::Vector3d& b, bool diagonal) {
    if (diagonal) return a * a.transpose();
    return (a * b.transpose() + b * a.transpose()) * (std::numbers::sqrt2 / 2.0);
}

}  // namespace

double Spd3::inner(const Point& p, const Vec& v, const Vec& w) const {
    const Mat3 pinv = p.inverse();
    return (pinv * v * pinv * w).trace();
}

double Spd3::norm(const Point& p, const Vec& v) const { return std::sqrt(std::max(inner(p, v, v), 0.0)); }

Spd3::Point Spd3::exp(const Point& p, const Vec& v) const {
    const Whitening w = whiten(p);
    return congruence(w.half, sym3::expm(congruence(w.invHalf, v)));
}

Spd3::Vec Spd3::log(const Point& p, const Point& q) const {
    const Whitening w = whiten(p);
    return congruence(w.half, sym3::logm(congruence(w.invHalf, q)));
}

double Spd3::dist(const Point& p, const Point& q) const {
    const Whitening w = whiten(p);
    const auto e = sym3::eigenSymmetric(congruence(w.invHalf, q));
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double l = std::log(e.values[i]);
        s += l * l;
    }
    return std::sqrt(s);
}

Spd3::Point Spd3::geodesicPoint(const Point& p, const Point& q, double t) const {
    const Vec v = log(p, q);
    const double d = norm(p, v);
    if (d == 0.0) return p;
    return exp(p, (t / d) * v);
}

Spd3::Vec Spd3::transport(const Point& p, const Point& q, const Vec& v) const {
    const Whitening w = whiten(p);
    const Mat3 a = sym3::sqrtm(congruence(w.invHalf, q));
    const Mat3 e = w.half * a * w.invHalf;
    return congruence(e, v);
}

JacobiFrame<Spd3> Spd3::jacobiFrame(const Point& p, const Point& q) const {
    const Whitening w = whiten(p);
    const auto e = sym3::eigenSymmetric(congruence(w.invHalf, q));
    Eigen::Vector3d delta;
    for (int i = 0; i < 3; ++i) delta[i] = std::log(e.values[i]);
    const double d = delta.norm();
    if (d == 0.0) throw Error(ErrorCode::DegenerateGeodesic, "spd3 jacobi frame: coincident points");
    const Eigen::Vector3d unit = delta / d;

    JacobiFrame<Spd3> frame{p, d, {}};
    frame.modes.reserve(6);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            const Mat3 ew = unitSym(e.vectors.col(i), e.vectors.col(j), i == j);
            const double diff = unit[i] - unit[j];
            frame.modes.push_back({i == j ? 0.0 : -0.25 * diff * diff, congruence(w.half, ew)});
        }
    }
    return frame;
}

std::vector<Spd3::Vec> Spd3::basis(const Point& p) const {
    const Whitening w = whiten(p);
    std::vector<Vec> out;
    out.reserve(6);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) out.push_back(congruence(w.half, unitSym(i, j)));
    return out;
}

bool Spd3::isValid(const Point& p, double tol) const {
    if (!p.allFinite()) return false;
    if ((p - p.transpose()).norm() > tol * std::max(1.0, p.norm())) return false;
    return Eigen::LLT<Mat3>(p).info() == Eigen::Success;
}

std::vector<double> Spd3::toRow(const Point& p) const {
    return {p(0, 0), p(0, 1), p(0, 2), p(1, 1), p(1, 2), p(2, 2)};
}

Eigen::Matrix3d Spd3::fromUpper(std::span<const double> e) {
    Mat3 m;
    m << e[0], e[1], e[2], e[1], e[3], e[4], e[2], e[4], e[5];
    return m;
}

Spd3::Point Spd3::fromRow(std::span<const double> row) const {
    if (row.size() != 6) throw Error(ErrorCode::InvalidArgument, "SPD3 row needs six entries");
    const Point p = fromUpper(row);
    if (!isValid(p)) throw Error(ErrorCode::InvalidArgument, "SPD3 row is not positive definite");
    return p;
}

}  // namespace mvw
