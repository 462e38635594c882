#include "mvw/mean.hpp"

#include <cmath>
#include <numbers>

namespace mvw {

namespace {
constexpr double kFlatCurvature = 1e-15;
}

double jacobiBoundaryFactor(double lambda, double d) {
    if (std::abs(lambda) < kFlatCurvature || d == 0.0) return 1.0;
    const double c = std::sqrt(std::abs(lambda)) * d;
    if (lambda > 0) {
        if (c >= std::numbers::pi) throw Error(ErrorCode::ConjugatePoint, "geodesic reaches a conjugate point");
        if (c < 1e-4) return 1.0 + c * c / 6.0;
        return c / std::sin(c);
    }
    if (c < 1e-4) return 1.0 - c * c / 6.0;
    return c / std::sinh(c);
}

double jacobiEndpointFactor(double lambda, double d) {
    if (std::abs(lambda) < kFlatCurvature || d == 0.0) return -1.0;
    const double c = std::sqrt(std::abs(lambda)) * d;
    if (lambda > 0) {
        if (c >= std::numbers::pi) throw Error(ErrorCode::ConjugatePoint, "geodesic reaches a conjugate point");
        if (c < 1e-4) return -(1.0 - c * c / 3.0);
        return -c * std::cos(c) / std::sin(c);
    }
    if (c < 1e-4) return -(1.0 + c * c / 3.0);
    return -c * std::cosh(c) / std::sinh(c);
}

}  // namespace mvw
