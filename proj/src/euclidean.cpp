#include "mvw/euclidean.hpp"

namespace mvw {

EuclideanN::Point EuclideanN::geodesicPoint(const Point& p, const Point& q, double t) const {
    const double d = dist(p, q);
    if (d == 0.0) return p;
    return p + (t / d) * (q - p);
}

JacobiFrame<EuclideanN> EuclideanN::jacobiFrame(const Point& p, const Point& q) const {
    const Vec v = q - p;
    const double d = v.norm();
    if (d == 0.0) throw Error(ErrorCode::DegenerateGeodesic, "euclidean jacobi frame: coincident points");
    // Orthonormal basis whose first vector is the geodesic direction.
    Eigen::MatrixXd m(n_, n_);
    m.col(0) = v / d;
    m.rightCols(n_ - 1) = Eigen::MatrixXd::Identity(n_, n_).leftCols(n_ - 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd qm = qr.householderQ() * Eigen::MatrixXd::Identity(n_, n_);
    if (qm.col(0).dot(v) < 0) qm.col(0) = -qm.col(0);
    JacobiFrame<EuclideanN> frame{p, d, {}};
    for (int i = 0; i < n_; ++i) frame.modes.push_back({0.0, qm.col(i)});
    return frame;
}

std::vector<EuclideanN::Vec> EuclideanN::basis(const Point&) const {
    std::vector<Vec> out;
    for (int i = 0; i < n_; ++i) out.push_back(Vec::Unit(n_, i));
    return out;
}

EuclideanN::Point EuclideanN::fromRow(std::span<const double> row) const {
    if (static_cast<int>(row.size()) != n_)
        throw Error(ErrorCode::InvalidArgument, "R" + std::to_string(n_) + " row has wrong width");
    Point p(n_);
    for (int i = 0; i < n_; ++i) p[i] = row[i];
    if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    return p;
}

EuclideanN::Point EuclideanN::point(std::initializer_list<double> values) const {
    Point p(n_);
    int i = 0;
    for (double v : values) p[i++] = v;
    return p;
}

}  // namespace mvw
