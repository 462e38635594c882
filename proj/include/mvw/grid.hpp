#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mvw/error.hpp"

namespace mvw {

using MultiIndex = std::vector<int>;

/// Extents of an s-dimensional regular grid, row-major (last index fastest).
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<int> dims);

    int rank() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int axis) const { return dims_[axis]; }
    std::size_t size() const { return size_; }

    std::size_t index(std::span<const int> site) const;
    MultiIndex site(std::size_t linear) const;

    /// Extents divided (or multiplied) by 2^levels along every axis.
    Shape coarsened(int levels) const;
    Shape refined(int levels) const;
    bool divisibleBy(int factor) const;

    std::string toString() const;
    bool operator==(const Shape&) const = default;

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

/// Manifold-valued samples on a regular grid.
template <class M>
struct Grid {
    M manifold;
    Shape shape;
    std::vector<typename M::Point> points;

    Grid() = default;
    Grid(M m, Shape s, std::vector<typename M::Point> p) : manifold(std::move(m)), shape(std::move(s)), points(std::move(p)) {
        if (points.size() != shape.size())
            throw Error(ErrorCode::InvalidArgument, "grid: point count does not match shape " + shape.toString());
    }
    static Grid filled(M m, Shape s, const typename M::Point& value) {
        std::vector<typename M::Point> pts(s.size(), value);
        return Grid(std::move(m), std::move(s), std::move(pts));
    }

    std::size_t size() const { return points.size(); }
    typename M::Point& operator[](std::size_t i) { return points[i]; }
    const typename M::Point& operator[](std::size_t i) const { return points[i]; }
    typename M::Point& at(std::span<const int> site) { return points[shape.index(site)]; }
    const typename M::Point& at(std::span<const int> site) const { return points[shape.index(site)]; }
};

/// Largest pointwise distance between two grids of equal shape.
template <class M>
double maxDistance(const Grid<M>& a, const Grid<M>& b) {
    if (!(a.shape == b.shape)) throw Error(ErrorCode::InvalidArgument, "maxDistance: shape mismatch");
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, a.manifold.dist(a[i], b[i]));
    return out;
}

}  // namespace mvw
