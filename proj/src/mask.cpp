#include "mvw/mask.hpp"

#include <algorithm>
#include <cmath>

namespace mvw {

const char* toString(MaskKind kind) {
    switch (kind) {
        case MaskKind::FirstOrder: return "first-order";
        case MaskKind::DD3: return "dd3";
    }
    return "?";
}

MaskKind parseMaskKind(const std::string& name) {
    if (name == "first-order" || name == "first_order" || name == "linear") return MaskKind::FirstOrder;
    if (name == "dd3" || name == "DD3") return MaskKind::DD3;
    throw Error(ErrorCode::Parse, "unknown mask '" + name + "' (expected first-order or dd3)");
}

Mask::Mask(MaskKind kind, int dimension) : kind_(kind), dimension_(dimension) {
    if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "mask dimension must be at least 1");
    if (kind == MaskKind::FirstOrder) {
        univariate_ = {{-1, 0.5}, {0, 1.0}, {1, 0.5}};
    } else {
        univariate_ = {{-3, -1.0 / 16.0}, {-1, 9.0 / 16.0}, {0, 1.0}, {1, 9.0 / 16.0}, {3, -1.0 / 16.0}};
    }
}

double Mask::univariate(int offset) const {
    auto it = univariate_.find(offset);
    return it == univariate_.end() ? 0.0 : it->second;
}

double Mask::coefficient(std::span<const int> offset) const {
    double out = 1.0;
    for (int v : offset) out *= univariate(v);
    return out;
}

std::map<MultiIndex, double> Mask::coefficients() const {
    std::map<MultiIndex, double> out{{MultiIndex{}, 1.0}};
    for (int axis = 0; axis < dimension_; ++axis) {
        std::map<MultiIndex, double> next;
        for (const auto& [prefix, w] : out)
            for (const auto& [off, a] : univariate_) {
                MultiIndex key = prefix;
                key.push_back(off);
                next[key] = w * a;
            }
        out = std::move(next);
    }
    return out;
}

int Mask::reproductionDegree() const { return kind_ == MaskKind::FirstOrder ? 1 : 3; }

Mask makeMask(MaskKind kind, int dimension) { return Mask(kind, dimension); }

std::string BoundaryRule::toString() const {
    switch (kind) {
        case Kind::Periodic: return "periodic";
        case Kind::Reflect: return "reflect";
        case Kind::PolynomialFit: return "polyfit" + std::to_string(order);
    }
    return "?";
}

BoundaryRule BoundaryRule::parse(const std::string& text) {
    if (text == "periodic") return periodic();
    if (text == "reflect") return reflect();
    if (text.rfind("polyfit", 0) == 0) {
        std::string digits = text.substr(7);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw Error(ErrorCode::Parse, "boundary '" + text + "': expected polyfit<order>, e.g. polyfit3");
        return polynomialFit(std::stoi(digits));
    }
    throw Error(ErrorCode::Parse, "unknown boundary rule '" + text + "' (expected periodic, reflect or polyfit<k>)");
}

void validateBoundary(const BoundaryRule& rule, const Mask& mask) {
    if (rule.kind == BoundaryRule::Kind::PolynomialFit && rule.order != mask.reproductionDegree())
        throw Error(ErrorCode::InvalidArgument, "polynomial boundary order " + std::to_string(rule.order) +
                                                    " does not match the mask's reproduction degree " +
                                                    std::to_string(mask.reproductionDegree()));
}

int mapIndex(int index, int length, const BoundaryRule& rule) {
    if (index >= 0 && index < length) return index;
    switch (rule.kind) {
        case BoundaryRule::Kind::Periodic: {
            int r = index % length;
            return r < 0 ? r + length : r;
        }
        case BoundaryRule::Kind::Reflect: {
            if (length == 1) return 0;
            const int period = 2 * (length - 1);
            int r = index % period;
            if (r < 0) r += period;
            return r >= length ? period - r : r;
        }
        case BoundaryRule::Kind::PolynomialFit: return -1;
    }
    return -1;
}

namespace {

std::vector<WeightedIndex> lagrangeWeights(int firstNode, int count, double x) {
    std::vector<WeightedIndex> out;
    for (int j = 0; j < count; ++j) {
        double w = 1.0;
        const double xj = firstNode + j;
        for (int m = 0; m < count; ++m) {
            if (m == j) continue;
            const double xm = firstNode + m;
            w *= (x - xm) / (xj - xm);
        }
        out.emplace_back(firstNode + j, w);
    }
    return out;
}

void mergeInto(std::vector<WeightedIndex>& out, int index, double w) {
    for (auto& [k, v] : out)
        if (k == index) {
            v += w;
            return;
        }
    out.emplace_back(index, w);
}

}  // namespace

std::vector<WeightedIndex> univariateStencil(int fine, int coarseLength, const Mask& mask, const BoundaryRule& rule) {
    if (coarseLength < 1) throw Error(ErrorCode::InvalidArgument, "empty coarse grid");
    if (fine % 2 == 0) return {{fine / 2, 1.0}};

    bool outside = false;
    std::vector<WeightedIndex> raw;
    for (const auto& [off, a] : mask.univariate()) {
        if ((fine - off) % 2 != 0) continue;
        const int k = (fine - off) / 2;
        if (k < 0 || k >= coarseLength) outside = true;
        raw.emplace_back(k, a);
    }

    if (outside && rule.kind == BoundaryRule::Kind::PolynomialFit) {
        const int degree = std::min(rule.order, coarseLength - 1);
        const bool left = std::any_of(raw.begin(), raw.end(), [](const WeightedIndex& e) { return e.first < 0; });
        const int first = left ? 0 : coarseLength - 1 - degree;
        return lagrangeWeights(first, degree + 1, 0.5 * fine);
    }

    std::vector<WeightedIndex> out;
    for (const auto& [k, a] : raw) mergeInto(out, mapIndex(k, coarseLength, rule), a);
    return out;
}

std::vector<WeightedSite> subdivisionStencil(std::span<const int> fineSite, const Shape& coarse, const Mask& mask,
                                             const BoundaryRule& rule) {
    if (static_cast<int>(fineSite.size()) != coarse.rank())
        throw Error(ErrorCode::InvalidArgument, "site rank does not match grid rank");
    std::map<std::size_t, double> merged{};
    std::vector<std::pair<MultiIndex, double>> partial{{MultiIndex{}, 1.0}};
    for (int axis = 0; axis < coarse.rank(); ++axis) {
        const auto uni = univariateStencil(fineSite[axis], coarse.dim(axis), mask, rule);
        std::vector<std::pair<MultiIndex, double>> next;
        next.reserve(partial.size() * uni.size());
        for (const auto& [prefix, w] : partial)
            for (const auto& [k, a] : uni) {
                MultiIndex key = prefix;
                key.push_back(k);
                next.emplace_back(std::move(key), w * a);
            }
        partial = std::move(next);
    }
    for (const auto& [site, w] : partial) merged[coarse.index(site)] += w;
    std::vector<WeightedSite> out;
    for (const auto& [idx, w] : merged)
        if (w != 0.0) out.emplace_back(idx, w);
    return out;
}

bool isEvenSite(std::span<const int> site) {
    for (int v : site)
        if (v % 2 != 0) return false;
    return true;
}

std::vector<PredictionStencil> levelStencils(const Shape& fine, int levels, int r, const Mask& mask,
                                             const BoundaryRule& rule) {
    if (r < 1 || r > levels) throw Error(ErrorCode::InvalidArgument, "level out of range");
    const Shape levelShape = fine.coarsened(levels - r);
    const Shape coarseShape = fine.coarsened(levels - r + 1);
    const int step = 1 << (levels - r);
    std::vector<PredictionStencil> out;
    MultiIndex scaled(fine.rank());
    for (std::size_t i = 0; i < levelShape.size(); ++i) {
        MultiIndex site = levelShape.site(i);
        if (isEvenSite(site)) continue;
        PredictionStencil st;
        st.level = r;
        for (int a = 0; a < fine.rank(); ++a) scaled[a] = site[a] * step;
        st.target = fine.index(scaled);
        for (const auto& [cidx, w] : subdivisionStencil(site, coarseShape, mask, rule)) {
            MultiIndex csite = coarseShape.site(cidx);
            for (int a = 0; a < fine.rank(); ++a) scaled[a] = csite[a] * 2 * step;
            st.sources.push_back(fine.index(scaled));
            st.weights.push_back(w);
        }
        st.site = std::move(site);
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace mvw
