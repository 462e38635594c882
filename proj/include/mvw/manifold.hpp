#pragma once

#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "mvw/error.hpp"

namespace mvw {

/// Library tolerances. Tests may pass tighter or looser values to the
/// validation helpers; algorithms always use these.
inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kOrthogonalityTolerance = 1e-10;

/// A tangent vector together with the point it is attached to.
template <class M>
struct Tangent {
    typename M::Point base;
    typename M::Vec vec;
};

/// One eigenpair of the Jacobi operator w -> R(w, T)T for the unit geodesic
/// direction T, expressed at the base point.
template <class M>
struct JacobiMode {
    double eigenvalue;
    typename M::Vec direction;
};

template <class M>
struct JacobiFrame {
    typename M::Point base;
    double geodesicLength = 0.0;
    std::vector<JacobiMode<M>> modes;
};

// clang-format off
template <class M>
concept RiemannianManifold = requires(const M& m, const typename M::Point& p,
                                      const typename M::Vec& v, std::span<const double> row) {
    { m.dim() } -> std::convertible_to<int>;
    { m.tag() } -> std::convertible_to<std::string>;
    { m.rowWidth() } -> std::convertible_to<int>;
    { m.zero(p) } -> std::same_as<typename M::Vec>;
    { m.inner(p, v, v) } -> std::convertible_to<double>;
    { m.norm(p, v) } -> std::convertible_to<double>;
    { m.exp(p, v) } -> std::same_as<typename M::Point>;
    { m.log(p, p) } -> std::same_as<typename M::Vec>;
    { m.dist(p, p) } -> std::convertible_to<double>;
    { m.geodesicPoint(p, p, 0.0) } -> std::same_as<typename M::Point>;
    { m.transport(p, p, v) } -> std::same_as<typename M::Vec>;
    { m.jacobiFrame(p, p) } -> std::same_as<JacobiFrame<M>>;
    { m.basis(p) } -> std::same_as<std::vector<typename M::Vec>>;
    { m.isValid(p, 0.0) } -> std::convertible_to<bool>;
    { m.toRow(p) } -> std::same_as<std::vector<double>>;
    { m.fromRow(row) } -> std::same_as<typename M::Point>;
};
// clang-format on

}  // namespace mvw
