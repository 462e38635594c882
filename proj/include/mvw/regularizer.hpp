#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mvw/atoms.hpp"
#include "mvw/descent.hpp"
#include "mvw/grid.hpp"
#include "mvw/mask.hpp"
#include "mvw/mean.hpp"
#include "mvw/multiscale.hpp"

namespace mvw {

/// Threshold on |d| below which a detail counts as zero for the l0 penalty.
inline constexpr double kZeroDetail = 1e-9;

struct RegParams {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha = 1.0;
    /// 0 selects the l0 penalty, q >= 1 the weighted q-norm of the details.
    double q = 1.0;
    int domainDim = 1;

    bool isL0() const { return q == 0.0; }
    void validate() const;
};

struct RegAtom {
    enum class Kind { Detail, CoarsePair };
    Kind kind = Kind::Detail;
    /// Detail: level r >= 1. CoarsePair: 0.
    int level = 0;
    /// Detail: site on the level-r grid. CoarsePair: coarse site n.
    MultiIndex site;
    /// CoarsePair: axis i of the pair (n - e_i, n).
    int direction = 0;
    /// Fine-grid index of the predicted sample, or of n.
    std::size_t target = 0;
    /// Detail: fine-grid indices of the contributors. CoarsePair: the index of n - e_i.
    std::vector<std::size_t> sources;
    std::vector<double> weights;
    /// Sorted union of target and sources.
    std::vector<std::size_t> touched;
};

bool atomsConflict(const RegAtom& a, const RegAtom& b);

/// Coarse-pair atoms first, then detail atoms by level and row-major site.
std::vector<RegAtom> buildRegAtoms(const Shape& fine, int levels, const Mask& mask, const BoundaryRule& boundary,
                                   bool coarsePairs, bool details);

/// The wavelet regularizer split into detail and coarse-pair atoms.
template <class M>
class WaveletRegularizer {
public:
    using Point = typename M::Point;
    using Vec = typename M::Vec;
    using Points = std::vector<Point>;

    WaveletRegularizer(M manifold, Shape fine, int levels, Mask mask, BoundaryRule boundary, RegParams params)
        : m_(std::move(manifold)), fine_(std::move(fine)), levels_(levels), mask_(std::move(mask)),
          boundary_(boundary), params_(params) {
        params_.validate();
        validateBoundary(boundary_, mask_);
        if (params_.domainDim != fine_.rank())
            throw Error(ErrorCode::InvalidArgument, "regularizer: domain dimension does not match the grid rank");
        atoms_ = buildRegAtoms(fine_, levels_, mask_, boundary_, params_.lambda2 > 0.0, params_.lambda1 > 0.0);
    }

    const M& manifold() const { return m_; }
    const Shape& shape() const { return fine_; }
    int levels() const { return levels_; }
    const RegParams& params() const { return params_; }
    const std::vector<RegAtom>& atoms() const { return atoms_; }

    /// Factor in front of |d|^q (or of the l0 indicator) at level r.
    double detailWeight(int level) const {
        if (params_.isL0()) return params_.lambda1;
        const double s = params_.domainDim, q = params_.q;
        return params_.lambda1 * std::exp2(level * q * (params_.alpha + s / 2.0 - s / q));
    }
    /// Factor in front of dist(prediction, sample)^q at level r.
    double distanceWeight(int level) const {
        if (params_.isL0()) return params_.lambda1;
        const double s = params_.domainDim, q = params_.q;
        return params_.lambda1 * std::exp2(level * q * (params_.alpha - s / q));
    }

    Tangent<M> detail(const Points& u, const RegAtom& atom) const {
        const Point anchor = predictFrom(u, atom);
        return {anchor, detailScale(params_.domainDim, atom.level) * m_.log(anchor, u[atom.target])};
    }

    double value(const Points& u, const RegAtom& atom) const { return localValue(atom, gather(u, atom)); }

    double total(const Points& u) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += value(u, a);
        return s;
    }

    SparseGradient<M> gradient(const Points& u, const RegAtom& atom) const {
        bool differentiable = true;
        const auto g = localGradient(atom, gather(u, atom), differentiable);
        SparseGradient<M> out;
        out.differentiable = differentiable;
        const auto order = localOrder(atom);
        for (std::size_t i = 0; i < order.size(); ++i) out.entries.emplace_back(order[i], g[i]);
        return out;
    }

    /// Proximal map of mu * (atom) applied in place on the touched sites.
    AtomOutcome prox(Points& u, const RegAtom& atom, double mu) const {
        if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox step must be positive");
        try {
            return atom.kind == RegAtom::Kind::CoarsePair ? proxPair(u, atom, mu) : proxDetail(u, atom, mu);
        } catch (const Error& e) {
            AtomOutcome out;
            out.skipped = true;
            out.reason = e.what();
            return out;
        }
    }

    // Grid-level convenience wrappers.
    double value(const Grid<M>& u, const RegAtom& atom) const { return value(u.points, atom); }
    double total(const Grid<M>& u) const { return total(u.points); }
    Grid<M> proxed(const Grid<M>& u, const RegAtom& atom, double mu, AtomOutcome* outcome = nullptr) const {
        Grid<M> out = u;
        const AtomOutcome o = prox(out.points, atom, mu);
        if (outcome) *outcome = o;
        return out;
    }

    /// Local objective of the prox: (1/2mu) sum dist(x0, x)^2 + atom(x).
    double proxObjective(const Points& x0, const Points& x, const RegAtom& atom, double mu) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = m_.dist(x0[i], x[i]);
            s += d * d;
        }
        return s / (2.0 * mu) + localValue(atom, x);
    }

    /// Touched points in local order: sources first, target last.
    Points gather(const Points& u, const RegAtom& atom) const {
        Points out;
        out.reserve(atom.sources.size() + 1);
        for (std::size_t k : atom.sources) out.push_back(u[k]);
        out.push_back(u[atom.target]);
        return out;
    }
    std::vector<std::size_t> localOrder(const RegAtom& atom) const {
        std::vector<std::size_t> out = atom.sources;
        out.push_back(atom.target);
        return out;
    }

    double localValue(const RegAtom& atom, const Points& x) const {
        if (atom.kind == RegAtom::Kind::CoarsePair) {
            const double d = m_.dist(x[0], x[1]);
            if (params_.isL0()) return d > kZeroDetail ? params_.lambda2 : 0.0;
            return params_.lambda2 * std::pow(d, params_.q);
        }
        const Point mean = localMean(atom, x);
        const double d = m_.dist(mean, x.back());
        if (params_.isL0()) return detailScale(params_.domainDim, atom.level) * d > kZeroDetail ? params_.lambda1 : 0.0;
        return distanceWeight(atom.level) * std::pow(d, params_.q);
    }

    std::vector<Vec> localGradient(const RegAtom& atom, const Points& x, bool& differentiable) const {
        differentiable = true;
        const double q = params_.q;
        std::vector<Vec> g;
        for (const auto& p : x) g.push_back(m_.zero(p));
        if (params_.isL0()) {
            differentiable = false;
            return g;
        }
        if (atom.kind == RegAtom::Kind::CoarsePair) {
            const double d = m_.dist(x[0], x[1]);
            if (d <= 1e-14) {
                differentiable = q >= 2.0;
                return g;
            }
            const double c = params_.lambda2 * q * std::pow(d, q - 2.0);
            g[0] = -c * m_.log(x[0], x[1]);
            g[1] = -c * m_.log(x[1], x[0]);
            return g;
        }
        const std::size_t k = atom.sources.size();
        const Points src(x.begin(), x.begin() + k);
        const Point mean = localMean(atom, x);
        const double d = m_.dist(mean, x.back());
        if (d <= 1e-14) {
            differentiable = q >= 2.0;
            return g;
        }
        const double c = distanceWeight(atom.level) * q * std::pow(d, q - 2.0);
        g[k] = -c * m_.log(x.back(), mean);
        const Vec atMean = -c * m_.log(mean, x.back());
        MeanLinearization<M> lin(m_, src, atom.weights, mean);
        for (std::size_t i = 0; i < k; ++i) g[i] = lin.pullback(i, atMean);
        return g;
    }

private:
    Point predictFrom(const Points& u, const RegAtom& atom) const {
        Points src;
        for (std::size_t k : atom.sources) src.push_back(u[k]);
        return intrinsicMean(m_, std::span<const Point>(src), std::span<const double>(atom.weights));
    }
    Point localMean(const RegAtom& atom, const Points& x) const {
        return intrinsicMean(m_, std::span<const Point>(x.data(), atom.sources.size()),
                             std::span<const double>(atom.weights));
    }

    void scatter(Points& u, const RegAtom& atom, const Points& x) const {
        for (std::size_t i = 0; i < atom.sources.size(); ++i) u[atom.sources[i]] = x[i];
        u[atom.target] = x.back();
    }

    AtomOutcome proxPair(Points& u, const RegAtom& atom, double mu) const {
        AtomOutcome out;
        const Point a = u[atom.sources[0]], b = u[atom.target];
        const double d = m_.dist(a, b);
        if (d == 0.0 || params_.lambda2 == 0.0) return out;
        const double ml = mu * params_.lambda2;
        double t;
        if (params_.isL0()) {
            if (d > 2.0 * std::sqrt(ml)) return out;
            t = 0.5 * d;
        } else if (params_.q == 1.0) {
            t = std::min(ml, 0.5 * d);
        } else if (params_.q == 2.0) {
            t = 2.0 * ml * d / (1.0 + 4.0 * ml);
        } else {
            return proxByDescent(u, atom, mu);
        }
        const Vec toB = m_.log(a, b), toA = m_.log(b, a);
        if (t == 0.5 * d) {
            const Point mid = m_.exp(a, 0.5 * toB);
            u[atom.sources[0]] = mid;
            u[atom.target] = mid;
        } else {
            u[atom.sources[0]] = m_.exp(a, (t / d) * toB);
            u[atom.target] = m_.exp(b, (t / d) * toA);
        }
        return out;
    }

    /// Generic prox by descent on the smooth branch (used for q outside {0, 1, 2} on pairs).
    AtomOutcome proxByDescent(Points& u, const RegAtom& atom, double mu) const {
        AtomOutcome out;
        const Points x0 = gather(u, atom);
        const auto res = smoothBranch(atom, x0, mu);
        if (res.value < proxObjective(x0, x0, atom, mu)) scatter(u, atom, res.points);
        out.stalled = !res.converged;
        return out;
    }

    DescentResult<M> smoothBranch(const RegAtom& atom, const Points& x0, double mu) const {
        auto value = [&](const Points& x) { return proxObjective(x0, x, atom, mu); };
        auto grad = [&](const Points& x) {
            bool diff = true;
            auto g = localGradient(atom, x, diff);
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = g[i] - (1.0 / mu) * m_.log(x[i], x0[i]);
            return g;
        };
        std::function<bool(const Points&)> stop;
        if (params_.q < 2.0 && atom.kind == RegAtom::Kind::Detail) {
            // Heading into the kink at zero detail: the annihilated branch covers that case.
            stop = [&](const Points& x) { return m_.dist(localMean(atom, x), x.back()) <= 1e-10; };
        }
        DescentOptions opts;
        opts.gradientTolerance = 1e-13 / mu;
        return localDescent<M>(m_, x0, value, grad, 0.5 * mu, opts, stop);
    }

    /// Minimizes V(x) = (1/2mu)(sum_k dist(x0_k, x_k)^2 + dist(M(x), y0)^2) over the
    /// contributors and returns the contributors followed by their mean.
    DescentResult<M> annihilatedBranch(const RegAtom& atom, const Points& x0, double mu) const {
        const std::size_t k = atom.sources.size();
        const Points src0(x0.begin(), x0.begin() + k);
        const Point& y0 = x0.back();
        auto value = [&](const Points& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double d = m_.dist(src0[i], x[i]);
                s += d * d;
            }
            const Point mean = intrinsicMean(m_, std::span<const Point>(x), std::span<const double>(atom.weights));
            const double d = m_.dist(mean, y0);
            return (s + d * d) / (2.0 * mu);
        };
        auto grad = [&](const Points& x) {
            const Point mean = intrinsicMean(m_, std::span<const Point>(x), std::span<const double>(atom.weights));
            std::vector<Vec> g(k);
            const Vec atMean = (-1.0 / mu) * m_.log(mean, y0);
            MeanLinearization<M> lin(m_, x, atom.weights, mean);
            for (std::size_t i = 0; i < k; ++i) g[i] = lin.pullback(i, atMean) - (1.0 / mu) * m_.log(x[i], src0[i]);
            return g;
        };
        DescentOptions opts;
        opts.gradientTolerance = 1e-13 / mu;
        auto res = localDescent<M>(m_, src0, value, grad, 0.5 * mu, opts);
        res.points.push_back(
            intrinsicMean(m_, std::span<const Point>(res.points), std::span<const double>(atom.weights)));
        return res;
    }

    AtomOutcome proxDetail(Points& u, const RegAtom& atom, double mu) const {
        AtomOutcome out;
        const Points x0 = gather(u, atom);
        const Point mean0 = localMean(atom, x0);
        const double d0 = m_.dist(mean0, x0.back());
        if (detailScale(params_.domainDim, atom.level) * d0 <= kZeroDetail && params_.q < 2.0) return out;
        if (d0 == 0.0) return out;

        if (params_.isL0()) {
            const auto ann = annihilatedBranch(atom, x0, mu);
            out.stalled = !ann.converged;
            if (ann.value <= params_.lambda1) scatter(u, atom, ann.points);
            return out;
        }

        const double f0 = proxObjective(x0, x0, atom, mu);
        double best = f0;
        const Points* chosen = nullptr;
        const auto smooth = smoothBranch(atom, x0, mu);
        if (smooth.value < best) {
            best = smooth.value;
            chosen = &smooth.points;
            out.stalled = !smooth.converged;
        }
        DescentResult<M> ann;
        if (params_.q < 2.0) {
            ann = annihilatedBranch(atom, x0, mu);
            const double fa = proxObjective(x0, ann.points, atom, mu);
            if (fa < best) {
                best = fa;
                chosen = &ann.points;
                out.stalled = !ann.converged;
            }
        }
        if (chosen) scatter(u, atom, *chosen);
        return out;
    }

    M m_;
    Shape fine_;
    int levels_;
    Mask mask_;
    BoundaryRule boundary_;
    RegParams params_;
    std::vector<RegAtom> atoms_;
};

}  // namespace mvw
