#pragma once

#include <Eigen/Dense>

#include "mvw/manifold.hpp"

namespace mvw {

/// Flat R^n. Every geometric operation reduces to vector arithmetic, which
/// makes it the reference against which the curved code paths are checked.
class EuclideanN {
public:
    using Point = Eigen::VectorXd;
    using Vec = Eigen::VectorXd;
    static constexpr int kMaxDim = Eigen::Dynamic;

    explicit EuclideanN(int n = 1) : n_(n) {}

    int dim() const { return n_; }
    std::string tag() const { return "R" + std::to_string(n_); }
    int rowWidth() const { return n_; }

    Vec zero(const Point&) const { return Vec::Zero(n_); }
    double inner(const Point&, const Vec& v, const Vec& w) const { return v.dot(w); }
    double norm(const Point&, const Vec& v) const { return v.norm(); }

    Point exp(const Point& p, const Vec& v) const { return p + v; }
    Vec log(const Point& p, const Point& q) const { return q - p; }
    double dist(const Point& p, const Point& q) const { return (q - p).norm(); }
    Point geodesicPoint(const Point& p, const Point& q, double t) const;
    Vec transport(const Point&, const Point&, const Vec& v) const { return v; }
    JacobiFrame<EuclideanN> jacobiFrame(const Point& p, const Point& q) const;
    std::vector<Vec> basis(const Point& p) const;

    bool isValid(const Point& p, double = 0.0) const { return p.size() == n_ && p.allFinite(); }
    std::vector<double> toRow(const Point& p) const { return {p.data(), p.data() + p.size()}; }
    Point fromRow(std::span<const double> row) const;

    Point point(std::initializer_list<double> values) const;

private:
    int n_;
};

}  // namespace mvw
