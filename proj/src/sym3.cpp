#include "mvw/sym3.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mvw::sym3 {

namespace {

constexpr double kJacobiTolerance = 1e-14;
constexpr int kMaxSweeps = 50;

double offDiagonal(const Mat3& a) {
    return a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
}

}  // namespace

Eigen3 eigenSymmetric(const Mat3& input) {
    Mat3 a = symmetrize(input);
    Mat3 v = Mat3::Identity();
    const double scale = std::max(a.squaredNorm(), 1e-300);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (offDiagonal(a) <= kJacobiTolerance * kJacobiTolerance * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 3> order{0, 1, 2};
    for (int i = 1; i < 3; ++i)
        for (int j = i; j > 0 && a(order[j], order[j]) < a(order[j - 1], order[j - 1]); --j) std::swap(order[j], order[j - 1]);

    Eigen3 out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = a(order[i], order[i]);
        Vec3 col = v.col(order[i]);
        int big = 0;
        for (int k = 1; k < 3; ++k)
            if (std::abs(col[k]) > std::abs(col[big]) + 1e-15) big = k;
        if (col[big] < 0) col = -col;
        out.vectors.col(i) = col;
    }
    return out;
}

Mat3 expm(const Mat3& a) {
    return spectralApply(eigenSymmetric(a), [](double x) { return std::exp(x); });
}

Mat3 logm(const Mat3& a) {
    return spectralApply(eigenSymmetric(a), [](double x) { return std::log(x); });
}

Mat3 sqrtm(const Mat3& a) {
    return spectralApply(eigenSymmetric(a), [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Mat3 invSqrtm(const Mat3& a) {
    return spectralApply(eigenSymmetric(a), [](double x) { return 1.0 / std::sqrt(x); });
}

}  // namespace mvw::sym3
