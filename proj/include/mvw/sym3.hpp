#pragma once

#include <Eigen/Dense>

namespace mvw::sym3 {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Eigendecomposition A = V diag(values) V^T of a symmetric 3x3 matrix.
/// Eigenvalues ascend; each eigenvector column has a nonnegative largest
/// component so the result is a deterministic function of A.
struct Eigen3 {
    Vec3 values;
    Mat3 vectors;
};

/// Cyclic Jacobi rotations, stopping when the off-diagonal mass drops below
/// 1e-14 relative to the Frobenius norm.
Eigen3 eigenSymmetric(const Mat3& a);

inline Mat3 symmetrize(const Mat3& a) { return 0.5 * (a + a.transpose()); }

/// V diag(f(values)) V^T.
template <class F>
Mat3 spectralApply(const Eigen3& e, F&& f) {
    Vec3 mapped;
    for (int i = 0; i < 3; ++i) mapped[i] = f(e.values[i]);
    return symmetrize(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

Mat3 expm(const Mat3& a);
Mat3 logm(const Mat3& a);   // a must be positive definite
Mat3 sqrtm(const Mat3& a);  // a must be positive semidefinite
Mat3 invSqrtm(const Mat3& a);

}  // namespace mvw::sym3
