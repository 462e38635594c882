#include "mvw/grid.hpp"

namespace mvw {

Shape::Shape(std::vector<int> dims) : dims_(std::move(dims)), strides_(dims_.size()) {
    if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "shape needs at least one axis");
    size_ = 1;
    for (int i = rank() - 1; i >= 0; --i) {
        if (dims_[i] <= 0) throw Error(ErrorCode::InvalidArgument, "shape extents must be positive");
        strides_[i] = size_;
        size_ *= static_cast<std::size_t>(dims_[i]);
    }
}

std::size_t Shape::index(std::span<const int> site) const {
    std::size_t out = 0;
    for (int i = 0; i < rank(); ++i) out += strides_[i] * static_cast<std::size_t>(site[i]);
    return out;
}

MultiIndex Shape::site(std::size_t linear) const {
    MultiIndex out(dims_.size());
    for (int i = 0; i < rank(); ++i) {
        out[i] = static_cast<int>(linear / strides_[i]);
        linear %= strides_[i];
    }
    return out;
}

Shape Shape::coarsened(int levels) const {
    if (!divisibleBy(1 << levels))
        throw Error(ErrorCode::InvalidArgument, "shape " + toString() + " is not divisible by 2^" + std::to_string(levels));
    std::vector<int> d = dims_;
    for (int& x : d) x >>= levels;
    return Shape(std::move(d));
}

Shape Shape::refined(int levels) const {
    std::vector<int> d = dims_;
    for (int& x : d) x <<= levels;
    return Shape(std::move(d));
}

bool Shape::divisibleBy(int factor) const {
    for (int x : dims_)
        if (x % factor != 0) return false;
    return true;
}

std::string Shape::toString() const {
    std::string s;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(dims_[i]);
    }
    return s;
}

}  // namespace mvw
