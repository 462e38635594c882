#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "mvw/circle.hpp"
#include "mvw/manifold.hpp"
#include "mvw/spd3.hpp"

namespace mvw {

/// log_p(q), except that on the circle an exactly antipodal pair resolves
/// to +pi instead of throwing.
template <class M>
typename M::Vec tangentToward(const M& m, const typename M::Point& p, const typename M::Point& q) {
    if constexpr (std::is_same_v<M, Circle>) {
        try {
            return m.log(p, q);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CutLocus) throw;
            return std::numbers::pi;
        }
    } else {
        return m.log(p, q);
    }
}

template <class M>
struct WeightedMeanProblem {
    std::vector<typename M::Point> points;
    std::vector<double> weights;
};

struct MeanOptions {
    int maxIterations = 200;
    int maxHalvings = 30;
    /// Stop once |sum_j w_j log_m(p_j)| <= tolerance * (1 + max_j dist(m, p_j)).
    double tolerance = 1e-13;
    /// Reported stationarity bound; failing it after maxIterations throws.
    double acceptTolerance = 1e-10;
};

namespace detail {

inline void checkWeights(std::span<const double> weights, std::size_t count) {
    if (weights.size() != count || count == 0)
        throw Error(ErrorCode::InvalidArgument, "mean: points and weights must be nonempty and of equal length");
    double sum = 0.0;
    bool nonzero = false;
    for (double w : weights) {
        sum += w;
        nonzero = nonzero || w != 0.0;
    }
    if (!nonzero) throw Error(ErrorCode::InvalidArgument, "mean: all weights are zero");
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "mean: weights must sum to one");
}

/// Ambient representer r of v at p: inner(p, v, w) equals frobenius(r, w).
template <class M>
typename M::Vec representer(const M&, const typename M::Point&, const typename M::Vec& v) {
    return v;
}

inline Eigen::Matrix3d representer(const Spd3&, const Eigen::Matrix3d& p, const Eigen::Matrix3d& v) {
    const Eigen::Matrix3d pinv = p.inverse();
    return pinv * v * pinv;
}

inline double frobenius(double a, double b) { return a * b; }

template <class A, class B>
double frobenius(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a.cwiseProduct(b).sum();
}

}  // namespace detail


/// Spectral factor of the boundary-to-initial Jacobi map J(1) -> J'(0)
/// with J(0) = 0, for sectional curvature `lambda` and geodesic length d.
double jacobiBoundaryFactor(double lambda, double d);
/// Factor of J(0) -> J'(0) for Jacobi fields with J(1) = 0.
double jacobiEndpointFactor(double lambda, double d);

/// Jacobi frame from p toward q, or a flat frame built from an orthonormal
/// basis when the points (nearly) coincide.
template <class M>
JacobiFrame<M> frameOrFlat(const M& m, const typename M::Point& p, const typename M::Point& q) {
    if (m.dist(p, q) > 1e-12) return m.jacobiFrame(p, q);
    JacobiFrame<M> frame{p, 0.0, {}};
    for (auto& e : m.basis(p)) frame.modes.push_back({0.0, e});
    return frame;
}

/// R_k w for w tangent at pk: weight * sum_i <PT(w^i), w> f1(lambda_i) w^i at the frame base.
template <class M>
typename M::Vec applyRk(const M& m, const JacobiFrame<M>& frame, const typename M::Point& pk, double weight,
                        const typename M::Vec& w) {
    typename M::Vec out = m.zero(frame.base);
    for (const auto& mode : frame.modes) {
        const auto moved = m.transport(frame.base, pk, mode.direction);
        const double alpha = m.inner(pk, moved, w);
        out = out + (alpha * jacobiBoundaryFactor(mode.eigenvalue, frame.geodesicLength)) * mode.direction;
    }
    return weight * out;
}

/// Adjoint of R_k: maps g tangent at the frame base to a tangent at pk.
template <class M>
typename M::Vec adjointRk(const M& m, const JacobiFrame<M>& frame, const typename M::Point& pk, double weight,
                          const typename M::Vec& g) {
    typename M::Vec out = m.zero(pk);
    for (const auto& mode : frame.modes) {
        const double beta = m.inner(frame.base, mode.direction, g);
        out = out + (beta * jacobiBoundaryFactor(mode.eigenvalue, frame.geodesicLength)) *
                        m.transport(frame.base, pk, mode.direction);
    }
    return weight * out;
}

/// Linearization of the mean map at a computed mean: the operator L
/// assembled in an orthonormal basis at the mean, and the per-point frames
/// used by R_k. Derivatives follow dM/dx_k w = -L^{-1} R_k w.
template <class M>
class MeanLinearization {
public:
    using Point = typename M::Point;
    using Vec = typename M::Vec;
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, M::kMaxDim, M::kMaxDim>;
    using Coords = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, M::kMaxDim, 1>;

    MeanLinearization(const M& m, std::span<const Point> points, std::span<const double> weights,
                      const Point& mean)
        : m_(m), mean_(mean), points_(points.begin(), points.end()), weights_(weights.begin(), weights.end()),
          basis_(m.basis(mean)) {
        const int n = m.dim();
        duals_.reserve(basis_.size());
        for (const auto& b : basis_) duals_.push_back(detail::representer(m, mean, b));
        frames_.reserve(points_.size());
        matrix_ = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < points_.size(); ++k) {
            frames_.push_back(frameOrFlat(m, mean, points_[k]));
            if (weights_[k] == 0.0) continue;
            const auto& frame = frames_.back();
            for (const auto& mode : frame.modes) {
                const Coords c = coords(mode.direction);
                matrix_ += (weights_[k] * jacobiEndpointFactor(mode.eigenvalue, frame.geodesicLength)) *
                           (c * c.transpose());
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(matrix_);
        const auto& ev = eig.eigenvalues();
        const double big = ev.cwiseAbs().maxCoeff();
        const double small = ev.cwiseAbs().minCoeff();
        if (!(small > 0.0) || big / small > 1e12)
            throw Error(ErrorCode::SingularL, "mean linearization: L is numerically singular");
        inverse_ = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    }

    const Point& mean() const { return mean_; }
    const Matrix& matrix() const { return matrix_; }
    const JacobiFrame<M>& frame(std::size_t k) const { return frames_[k]; }

    Coords coords(const Vec& v) const {
        Coords c(static_cast<int>(basis_.size()));
        for (std::size_t j = 0; j < basis_.size(); ++j) c[j] = detail::frobenius(duals_[j], v);
        return c;
    }
    Vec fromCoords(const Coords& c) const {
        Vec v = m_.zero(mean_);
        for (std::size_t j = 0; j < basis_.size(); ++j) v = v + c[j] * basis_[j];
        return v;
    }

    Vec applyL(const Vec& v) const { return fromCoords(matrix_ * coords(v)); }
    Vec solveL(const Vec& v) const { return fromCoords(inverse_ * coords(v)); }

    /// Directional derivative of the mean when point k moves along w.
    Vec derivative(std::size_t k, const Vec& w) const {
        return -1.0 * solveL(applyRk(m_, frames_[k], points_[k], weights_[k], w));
    }

    /// Gradient with respect to point k of a function of the mean whose
    /// gradient at the mean is g.
    Vec pullback(std::size_t k, const Vec& g) const {
        if (weights_[k] == 0.0) return m_.zero(points_[k]);
        return -1.0 * adjointRk(m_, frames_[k], points_[k], weights_[k], solveL(g));
    }

private:
    const M& m_;
    Point mean_;
    std::vector<Point> points_;
    std::vector<double> weights_;
    std::vector<Vec> basis_;
    std::vector<Vec> duals_;
    std::vector<JacobiFrame<M>> frames_;
    Matrix matrix_;
    Matrix inverse_;
};

/// Weighted intrinsic mean for affine weights (sum one, signs arbitrary):
/// a stationary point of v -> sum_j w_j dist(v, p_j)^2. Damped Newton
/// iteration on the stationarity equation sum_j w_j log_v(p_j) = 0 with
/// backtracking on its norm, started at `init` or at the point carrying the
/// largest weight. Where the linearization is unavailable the unit gradient
/// step is used instead. On the circle a missing stationary point falls back
/// to the weighted combination of angles unwrapped at the start point.
template <class M>
typename M::Point intrinsicMean(const M& m, std::span<const typename M::Point> points,
                                std::span<const double> weights,
                                const typename M::Point* init = nullptr, const MeanOptions& options = {}) {
    using Point = typename M::Point;
    using Vec = typename M::Vec;
    detail::checkWeights(weights, points.size());
    if (points.size() == 1) return points[0];

    std::size_t start = 0;
    for (std::size_t j = 1; j < weights.size(); ++j)
        if (weights[j] > weights[start]) start = j;
    Point x = init ? *init : points[start];

    auto residual = [&](const Point& v, double& scale) {
        Vec g = m.zero(v);
        scale = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            const Vec l = tangentToward(m, v, points[j]);
            scale = std::max(scale, m.norm(v, l));
            g = g + weights[j] * l;
        }
        scale += 1.0;
        return g;
    };
    auto newtonDirection = [&](const Point& v, const Vec& g) -> Vec {
        try {
            MeanLinearization<M> lin(m, points, weights, v);
            return -1.0 * lin.solveL(g);
        } catch (const Error&) {
            return g;
        }
    };

    double scale = 1.0;
    Vec g = residual(x, scale);
    double gnorm = m.norm(x, g);
    for (int it = 0; it < options.maxIterations; ++it) {
        if (gnorm <= options.tolerance * scale) return x;
        const Vec d = newtonDirection(x, g);
        double t = 1.0;
        bool accepted = false;
        Point trial = x;
        Vec next = g;
        double nextScale = scale, nextNorm = gnorm;
        for (int h = 0; h <= options.maxHalvings; ++h, t *= 0.5) {
            try {
                trial = m.exp(x, t * d);
                next = residual(trial, nextScale);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::CutLocus) throw;
                continue;
            }
            nextNorm = m.norm(trial, next);
            if (nextNorm <= (1.0 - 1e-4 * t) * gnorm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        x = trial;
        g = next;
        gnorm = nextNorm;
        scale = nextScale;
    }
    if (gnorm <= options.acceptTolerance * scale) return x;
    if constexpr (std::is_same_v<M, Circle>) {
        // No stationary point exists when a negatively weighted sample sits
        // near the antipode: use the combination unwrapped at the start point.
        const Point x0 = init ? *init : points[start];
        double v = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) v += weights[j] * tangentToward(m, x0, points[j]);
        return m.exp(x0, v);
    }
    throw Error(ErrorCode::NoConvergence, "intrinsic mean did not converge");
}

template <class M>
typename M::Point intrinsicMean(const M& m, const WeightedMeanProblem<M>& prob,
                                const std::optional<typename M::Point>& init = std::nullopt,
                                const MeanOptions& options = {}) {
    return intrinsicMean(m, std::span<const typename M::Point>(prob.points), std::span<const double>(prob.weights),
                         init ? &*init : nullptr, options);
}

template <class M>
typename M::Vec meanDerivative(const M& m, const WeightedMeanProblem<M>& prob, const typename M::Point& mean,
                               std::size_t k0, const typename M::Vec& w) {
    MeanLinearization<M> lin(m, prob.points, prob.weights, mean);
    return lin.derivative(k0, w);
}

/// L* v = sum_k w_k l_k* v. L is self-adjoint, so this is also L v.
template <class M>
typename M::Vec adjointL(const M& m, const WeightedMeanProblem<M>& prob, const typename M::Point& mean,
                         const typename M::Vec& v) {
    return MeanLinearization<M>(m, prob.points, prob.weights, mean).applyL(v);
}

template <class M>
typename M::Vec solveAdjointL(const M& m, const WeightedMeanProblem<M>& prob, const typename M::Point& mean,
                              const typename M::Vec& v) {
    return MeanLinearization<M>(m, prob.points, prob.weights, mean).solveL(v);
}

}  // namespace mvw
