#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include "mvw/circle.hpp"
#include "mvw/error.hpp"
#include "mvw/euclidean.hpp"
#include "mvw/grid.hpp"
#include "mvw/spd3.hpp"
#include "mvw/sphere.hpp"

namespace mvw {

/// Counter-based random source: the stream for a site depends only on the
/// seed and the site index, so generation order does not matter.
class SiteRng {
public:
    SiteRng(std::uint64_t seed, std::uint64_t site);

    std::uint64_t next();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();
    /// Von Mises angle around zero with concentration kappa (Best-Fisher rejection).
    double vonMises(double kappa);

private:
    std::uint64_t state_;
    bool hasSpare_ = false;
    double spare_ = 0.0;
};

struct NoiseSpec {
    enum class Kind { VonMises, TangentGaussian, Rician };
    Kind kind = Kind::VonMises;
    /// kappa, sigma or eta depending on the kind.
    double parameter = 1.0;
    std::uint64_t seed = 0;

    static NoiseSpec vonMises(double kappa, std::uint64_t seed) { return {Kind::VonMises, kappa, seed}; }
    static NoiseSpec tangentGaussian(double sigma, std::uint64_t seed) { return {Kind::TangentGaussian, sigma, seed}; }
    static NoiseSpec rician(double eta, std::uint64_t seed) { return {Kind::Rician, eta, seed}; }

    void validate() const;
    std::string describe() const;
};

NoiseSpec::Kind parseNoiseKind(const std::string& s);
const char* toString(NoiseSpec::Kind k);

/// Entry-wise standard deviation of the Rician model for parameter eta.
inline double ricianSigma(double eta) { return eta / 1000.0; }

double noisyAngle(double g, double kappa, SiteRng& rng);
Eigen::Vector3d noisySpherePoint(const Sphere& s, const Eigen::Vector3d& g, double sigma, SiteRng& rng);
Eigen::Matrix3d noisySpd(const Eigen::Matrix3d& g, double eta, SiteRng& rng);

template <class M>
Grid<M> applyNoise(const Grid<M>& g, const NoiseSpec& spec) {
    spec.validate();
    auto mismatch = [&] {
        return Error(ErrorCode::ManifoldMismatch,
                     std::string(toString(spec.kind)) + " noise does not apply to " + g.manifold.tag() + " data");
    };
    Grid<M> out = g;
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        SiteRng rng(spec.seed, i);
        if constexpr (std::is_same_v<M, Circle>) {
            if (spec.kind != NoiseSpec::Kind::VonMises) throw mismatch();
            out.points[i] = noisyAngle(g.points[i], spec.parameter, rng);
        } else if constexpr (std::is_same_v<M, Sphere>) {
            if (spec.kind != NoiseSpec::Kind::TangentGaussian) throw mismatch();
            out.points[i] = noisySpherePoint(g.manifold, g.points[i], spec.parameter, rng);
        } else if constexpr (std::is_same_v<M, Spd3>) {
            if (spec.kind != NoiseSpec::Kind::Rician) throw mismatch();
            out.points[i] = noisySpd(g.points[i], spec.parameter, rng);
        } else {
            throw mismatch();
        }
    }
    return out;
}

struct SnrResult {
    double db = 0.0;
    /// Set when the reconstruction equals the ground truth exactly.
    bool infinite = false;
};

/// 10 log10( sum d(g,f)^2 / sum d(g,u)^2 ).
template <class M>
SnrResult deltaSNR(const Grid<M>& g, const Grid<M>& f, const Grid<M>& u) {
    if (!(g.shape == f.shape) || !(g.shape == u.shape))
        throw Error(ErrorCode::InvalidArgument, "deltaSNR needs grids of equal shape");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        num += std::pow(g.manifold.dist(g.points[i], f.points[i]), 2);
        den += std::pow(g.manifold.dist(g.points[i], u.points[i]), 2);
    }
    SnrResult r;
    if (den == 0.0) {
        r.infinite = true;
        r.db = std::numeric_limits<double>::infinity();
    } else {
        r.db = 10.0 * std::log10(num / den);
    }
    return r;
}

enum class PhantomKind { Constant, Ramp, SmoothJumps };
PhantomKind parsePhantomKind(const std::string& s);
const char* toString(PhantomKind k);

/// Deterministic test signals (rank 1) and images (rank 2).
Grid<Circle> makePhantom(PhantomKind kind, const Shape& shape, const Circle& m);
Grid<Sphere> makePhantom(PhantomKind kind, const Shape& shape, const Sphere& m);
Grid<Spd3> makePhantom(PhantomKind kind, const Shape& shape, const Spd3& m);
Grid<EuclideanN> makePhantom(PhantomKind kind, const Shape& shape, const EuclideanN& m);

}  // namespace mvw
