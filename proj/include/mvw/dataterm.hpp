#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mvw/atoms.hpp"
#include "mvw/grid.hpp"
#include "mvw/mask.hpp"
#include "mvw/mean.hpp"

namespace mvw {

struct ImagingOperator {
    enum class Kind { Identity, InpaintMask, MeanKernel };
    Kind kind = Kind::Identity;
    /// InpaintMask: one flag per grid site, true where the observation is kept.
    std::vector<bool> keep;
    /// MeanKernel: centred univariate taps (odd length), applied as a tensor product.
    std::vector<double> kernel;
    BoundaryRule boundary = BoundaryRule::reflect();

    static ImagingOperator identity() { return {}; }
    static ImagingOperator inpaint(std::vector<bool> keep);
    static ImagingOperator meanKernel(std::vector<double> taps, BoundaryRule boundary);
    static ImagingOperator gaussian(double sigma, int window, BoundaryRule boundary);

    std::string describe() const;
};

/// Sampled Gaussian exp(-k^2 / (2 sigma^2)) on a centred window, normalized to sum one.
std::vector<double> gaussianTaps(double sigma, int window);

struct DataAtom {
    std::size_t site = 0;
    std::vector<std::size_t> sources;
    std::vector<double> weights;
    std::vector<std::size_t> touched;
};

/// One atom per observed site; rows of a mean kernel are truncated at
/// PolynomialFit boundaries and renormalized to sum one.
std::vector<DataAtom> buildDataAtoms(const Shape& shape, const ImagingOperator& op);

/// The data term sum_i dist(A(u)_i, f_i)^p.
template <class M>
class DataTerm {
public:
    using Point = typename M::Point;
    using Vec = typename M::Vec;
    using Points = std::vector<Point>;

    DataTerm(M manifold, Shape shape, ImagingOperator op, double p, Grid<M> f)
        : m_(std::move(manifold)), shape_(std::move(shape)), op_(std::move(op)), p_(p), f_(std::move(f)) {
        if (!(p_ == 1.0 || p_ == 2.0)) throw Error(ErrorCode::InvalidArgument, "data exponent p must be 1 or 2");
        if (!(f_.shape == shape_)) throw Error(ErrorCode::InvalidArgument, "observations do not match the grid shape");
        atoms_ = buildDataAtoms(shape_, op_);
    }

    const M& manifold() const { return m_; }
    const ImagingOperator& op() const { return op_; }
    double p() const { return p_; }
    const Grid<M>& observations() const { return f_; }
    const std::vector<DataAtom>& atoms() const { return atoms_; }
    bool hasProx() const { return op_.kind != ImagingOperator::Kind::MeanKernel; }

    Point apply(const Points& u, const DataAtom& atom) const { return localApply(atom, gather(u, atom)); }

    double value(const Points& u, const DataAtom& atom) const { return localValue(atom, gather(u, atom)); }

    double total(const Points& u) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += value(u, a);
        return s;
    }

    SparseGradient<M> gradient(const Points& u, const DataAtom& atom) const {
        bool differentiable = true;
        const auto g = localGradient(atom, gather(u, atom), differentiable);
        SparseGradient<M> out;
        out.differentiable = differentiable;
        for (std::size_t i = 0; i < atom.sources.size(); ++i) out.entries.emplace_back(atom.sources[i], g[i]);
        return out;
    }

    /// Closed-form prox of mu * D_i for the identity and inpainting operators.
    AtomOutcome prox(Points& u, const DataAtom& atom, double mu) const {
        if (!hasProx()) throw Error(ErrorCode::InvalidArgument, "data prox needs the identity or inpainting operator");
        AtomOutcome out;
        const Point& x = u[atom.site];
        const Point& f = f_[atom.site];
        try {
            const double d = m_.dist(x, f);
            if (d == 0.0) return out;
            const double t = p_ == 1.0 ? std::min(mu, d) : 2.0 * mu * d / (1.0 + 2.0 * mu);
            u[atom.site] = t == d ? f : m_.exp(x, (t / d) * m_.log(x, f));
        } catch (const Error& e) {
            out.skipped = true;
            out.reason = e.what();
        }
        return out;
    }

    Points gather(const Points& u, const DataAtom& atom) const {
        Points out;
        out.reserve(atom.sources.size());
        for (std::size_t k : atom.sources) out.push_back(u[k]);
        return out;
    }

    Point localApply(const DataAtom& atom, const Points& x) const {
        if (x.size() == 1) return x[0];
        return intrinsicMean(m_, std::span<const Point>(x), std::span<const double>(atom.weights));
    }

    double localValue(const DataAtom& atom, const Points& x) const {
        const double d = m_.dist(localApply(atom, x), f_[atom.site]);
        return p_ == 1.0 ? d : d * d;
    }

    std::vector<Vec> localGradient(const DataAtom& atom, const Points& x, bool& differentiable) const {
        differentiable = true;
        std::vector<Vec> g;
        for (const auto& p : x) g.push_back(m_.zero(p));
        const Point a = localApply(atom, x);
        const Point& f = f_[atom.site];
        const double d = m_.dist(a, f);
        if (d <= 1e-14) {
            differentiable = p_ >= 2.0;
            return g;
        }
        const double c = p_ * std::pow(d, p_ - 2.0);
        const Vec atA = -c * m_.log(a, f);
        if (x.size() == 1) {
            g[0] = atA;
            return g;
        }
        MeanLinearization<M> lin(m_, x, atom.weights, a);
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = lin.pullback(i, atA);
        return g;
    }

private:
    M m_;
    Shape shape_;
    ImagingOperator op_;
    double p_;
    Grid<M> f_;
    std::vector<DataAtom> atoms_;
};

/// A(u): per-site weighted intrinsic means of the operator rows. Sites an
/// inpainting mask drops keep their input value.
template <class M>
Grid<M> applyOperator(const ImagingOperator& op, const Grid<M>& u) {
    Grid<M> out = u;
    for (const auto& atom : buildDataAtoms(u.shape, op)) {
        if (atom.sources.size() == 1) {
            out[atom.site] = u[atom.sources[0]];
            continue;
        }
        std::vector<typename M::Point> pts;
        for (std::size_t k : atom.sources) pts.push_back(u[k]);
        try {
            out[atom.site] = intrinsicMean(u.manifold, std::span<const typename M::Point>(pts),
                                           std::span<const double>(atom.weights));
        } catch (const Error& e) {
            throw e.withSite(atom.site);
        }
    }
    return out;
}

}  // namespace mvw
