#pragma once

#include <cmath>
#include <vector>

#include "mvw/grid.hpp"
#include "mvw/manifold.hpp"
#include "mvw/mask.hpp"
#include "mvw/mean.hpp"

namespace mvw {

/// Scale factor 2^{-s r / 2} relating log-differences and detail coefficients.
inline double detailScale(int domainDim, int level) { return std::exp2(-0.5 * domainDim * level); }

/// Geometric prediction: the weighted intrinsic mean of the stencil's sources.
template <class M>
typename M::Point predict(const M& m, const std::vector<typename M::Point>& u, const PredictionStencil& st) {
    std::vector<typename M::Point> pts;
    pts.reserve(st.sources.size());
    for (std::size_t k : st.sources) pts.push_back(u[k]);
    try {
        return intrinsicMean(m, std::span<const typename M::Point>(pts), std::span<const double>(st.weights));
    } catch (const Error& e) {
        throw e.withSite(st.target);
    }
}

/// One refinement step of the geometric subdivision scheme.
template <class M>
Grid<M> subdivide(const Grid<M>& coarse, const Mask& mask, const BoundaryRule& boundary) {
    validateBoundary(boundary, mask);
    if (mask.dimension() != coarse.shape.rank())
        throw Error(ErrorCode::InvalidArgument, "subdivide: mask dimension does not match grid rank");
    const Shape fine = coarse.shape.refined(1);
    std::vector<typename M::Point> out(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const MultiIndex site = fine.site(i);
        const auto stencil = subdivisionStencil(site, coarse.shape, mask, boundary);
        if (isEvenSite(site)) {
            out[i] = coarse[stencil.front().first];
            continue;
        }
        std::vector<typename M::Point> pts;
        std::vector<double> w;
        for (const auto& [k, a] : stencil) {
            pts.push_back(coarse[k]);
            w.push_back(a);
        }
        try {
            out[i] = intrinsicMean(coarse.manifold, std::span<const typename M::Point>(pts), std::span<const double>(w));
        } catch (const Error& e) {
            throw e.withSite(i);
        }
    }
    return Grid<M>(coarse.manifold, fine, std::move(out));
}

template <class M>
struct DetailCoefficient {
    MultiIndex site;       // position on the level grid
    typename M::Point anchor;
    typename M::Vec coeff;
};

template <class M>
struct PyramidLevel {
    Shape shape;
    std::vector<DetailCoefficient<M>> details;
};

/// Coarse samples plus per-level detail tangents; levels[0] is level 1.
template <class M>
struct Pyramid {
    Grid<M> coarse;
    std::vector<PyramidLevel<M>> levels;
    int levelCount = 0;
    MaskKind mask = MaskKind::DD3;
    BoundaryRule boundary;
};

/// Samples of level r of a fine grid with `levels` levels: u_{2^{R-r} n}.
template <class M>
Grid<M> sampleLevel(const Grid<M>& fine, int levels, int r) {
    const Shape shape = fine.shape.coarsened(levels - r);
    const int step = 1 << (levels - r);
    std::vector<typename M::Point> pts(shape.size());
    MultiIndex scaled(shape.rank());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const MultiIndex site = shape.site(i);
        for (int a = 0; a < shape.rank(); ++a) scaled[a] = site[a] * step;
        pts[i] = fine.at(scaled);
    }
    return Grid<M>(fine.manifold, shape, std::move(pts));
}

template <class M>
Pyramid<M> forwardTransform(const Grid<M>& fine, int levels, const Mask& mask, const BoundaryRule& boundary) {
    if (levels < 0) throw Error(ErrorCode::InvalidArgument, "level count must be nonnegative");
    validateBoundary(boundary, mask);
    if (mask.dimension() != fine.shape.rank())
        throw Error(ErrorCode::InvalidArgument, "forwardTransform: mask dimension does not match grid rank");
    if (!fine.shape.divisibleBy(1 << levels))
        throw Error(ErrorCode::InvalidArgument,
                    "grid " + fine.shape.toString() + " is not divisible by 2^" + std::to_string(levels));
    const M& m = fine.manifold;
    const int s = fine.shape.rank();
    Pyramid<M> pyr;
    pyr.coarse = sampleLevel(fine, levels, 0);
    pyr.levelCount = levels;
    pyr.mask = mask.kind();
    pyr.boundary = boundary;
    for (int r = 1; r <= levels; ++r) {
        const auto stencils = levelStencils(fine.shape, levels, r, mask, boundary);
        PyramidLevel<M> level;
        level.shape = fine.shape.coarsened(levels - r);
        level.details.resize(stencils.size());
        const double scale = detailScale(s, r);
        for (std::size_t j = 0; j < stencils.size(); ++j) {
            const auto& st = stencils[j];
            auto& d = level.details[j];
            d.site = st.site;
            d.anchor = predict(m, fine.points, st);
            try {
                d.coeff = scale * m.log(d.anchor, fine[st.target]);
            } catch (const Error& e) {
                throw e.withSite(st.target);
            }
        }
        pyr.levels.push_back(std::move(level));
    }
    return pyr;
}

template <class M>
Grid<M> inverseTransform(const Pyramid<M>& pyr, const Mask& mask, const BoundaryRule& boundary) {
    validateBoundary(boundary, mask);
    const int levels = pyr.levelCount;
    if (static_cast<int>(pyr.levels.size()) != levels)
        throw Error(ErrorCode::InvalidArgument, "pyramid level count does not match its detail levels");
    const M& m = pyr.coarse.manifold;
    const Shape fine = pyr.coarse.shape.refined(levels);
    const int s = fine.rank();
    std::vector<typename M::Point> u(fine.size(), pyr.coarse[0]);
    const int step0 = 1 << levels;
    MultiIndex scaled(s);
    for (std::size_t i = 0; i < pyr.coarse.size(); ++i) {
        const MultiIndex site = pyr.coarse.shape.site(i);
        for (int a = 0; a < s; ++a) scaled[a] = site[a] * step0;
        u[fine.index(scaled)] = pyr.coarse[i];
    }
    for (int r = 1; r <= levels; ++r) {
        const auto stencils = levelStencils(fine, levels, r, mask, boundary);
        const auto& level = pyr.levels[r - 1];
        if (level.details.size() != stencils.size())
            throw Error(ErrorCode::InvalidArgument, "pyramid level " + std::to_string(r) + " has the wrong detail count");
        const double scale = 1.0 / detailScale(s, r);
        for (std::size_t j = 0; j < stencils.size(); ++j) {
            const auto& st = stencils[j];
            const auto anchor = predict(m, u, st);
            u[st.target] = m.exp(anchor, scale * level.details[j].coeff);
        }
    }
    return Grid<M>(m, fine, std::move(u));
}

}  // namespace mvw
