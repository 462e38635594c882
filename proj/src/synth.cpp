#include "mvw/synth.hpp"

#include <numbers>

#include "mvw/sym3.hpp"

namespace mvw {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr double kPi = std::numbers::pi;

}  // namespace

SiteRng::SiteRng(std::uint64_t seed, std::uint64_t site) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix(s);
    std::uint64_t t = a ^ (site * 0xD1B54A32D192ED03ULL);
    state_ = splitmix(t);
}

std::uint64_t SiteRng::next() { return splitmix(state_); }

double SiteRng::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double SiteRng::normal() {
    if (hasSpare_) {
        hasSpare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * kPi * uniform();
    spare_ = r * std::sin(phi);
    hasSpare_ = true;
    return r * std::cos(phi);
}

double SiteRng::vonMises(double kappa) {
    const double a = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double b = (a - std::sqrt(2.0 * a)) / (2.0 * kappa);
    const double r = (1.0 + b * b) / (2.0 * b);
    for (;;) {
        const double z = std::cos(kPi * uniform());
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = uniform();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double theta = std::acos(std::clamp(f, -1.0, 1.0));
            return uniform() < 0.5 ? -theta : theta;
        }
    }
}

void NoiseSpec::validate() const {
    if (!(parameter > 0.0) || !std::isfinite(parameter))
        throw Error(ErrorCode::InvalidArgument, "noise parameter must be positive and finite");
}

const char* toString(NoiseSpec::Kind k) {
    switch (k) {
        case NoiseSpec::Kind::VonMises: return "von-mises";
        case NoiseSpec::Kind::TangentGaussian: return "tangent-gaussian";
        case NoiseSpec::Kind::Rician: return "rician";
    }
    return "?";
}

NoiseSpec::Kind parseNoiseKind(const std::string& s) {
    if (s == "von-mises") return NoiseSpec::Kind::VonMises;
    if (s == "tangent-gaussian") return NoiseSpec::Kind::TangentGaussian;
    if (s == "rician") return NoiseSpec::Kind::Rician;
    throw Error(ErrorCode::Parse, "unknown noise kind '" + s + "' (expected von-mises, tangent-gaussian or rician)");
}

std::string NoiseSpec::describe() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s(%.17g, seed=%llu)", toString(kind), parameter, static_cast<unsigned long long>(seed));
    return buf;
}

double noisyAngle(double g, double kappa, SiteRng& rng) { return Circle::wrap(g + rng.vonMises(kappa)); }

Eigen::Vector3d noisySpherePoint(const Sphere& s, const Eigen::Vector3d& g, double sigma, SiteRng& rng) {
    const auto basis = s.basis(g);
    const double a = sigma * rng.normal();
    const double b = sigma * rng.normal();
    const Eigen::Vector3d v = a * basis[0] + b * basis[1];
    return s.exp(g, v);
}

Eigen::Matrix3d noisySpd(const Eigen::Matrix3d& g, double eta, SiteRng& rng) {
    const double sigma = ricianSigma(eta);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Eigen::Matrix3d out;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const double a = g(i, j);
                const double re = std::abs(a) + sigma * rng.normal();
                const double im = sigma * rng.normal();
                out(i, j) = out(j, i) = std::copysign(std::hypot(re, im), a);
            }
        if (sym3::eigenSymmetric(out).values[0] > 0.0) return out;
    }
    throw Error(ErrorCode::NumericalAbort, "Rician noise failed to produce a positive definite matrix");
}

const char* toString(PhantomKind k) {
    switch (k) {
        case PhantomKind::Constant: return "constant";
        case PhantomKind::Ramp: return "ramp";
        case PhantomKind::SmoothJumps: return "smooth-jumps";
    }
    return "?";
}

PhantomKind parsePhantomKind(const std::string& s) {
    if (s == "constant") return PhantomKind::Constant;
    if (s == "ramp") return PhantomKind::Ramp;
    if (s == "smooth-jumps") return PhantomKind::SmoothJumps;
    throw Error(ErrorCode::Parse, "unknown phantom '" + s + "' (expected constant, ramp or smooth-jumps)");
}

namespace {

void checkPhantomShape(const Shape& shape) {
    if (shape.rank() < 1 || shape.rank() > 2 || shape.size() == 0)
        throw Error(ErrorCode::InvalidArgument, "phantoms are 1-D signals or 2-D images");
}

/// Normalized coordinates of a site in [0, 1).
std::pair<double, double> coords(const Shape& shape, std::size_t i) {
    const MultiIndex s = shape.site(i);
    const double x = static_cast<double>(s[0]) / shape.dim(0);
    const double y = shape.rank() > 1 ? static_cast<double>(s[1]) / shape.dim(1) : 0.0;
    return {x, y};
}

/// Piecewise smooth scalar fields shared by the phantoms. Channel c selects
/// one of a few decorrelated variants.
double jumpSignal(double x, int c) {
    const double shift = 0.37 * c;
    if (x < 0.3) return -1.0 + 2.0 * x + 0.5 * std::sin(6.0 * kPi * x + shift);
    if (x < 0.55) return 1.4 + 0.8 * std::cos(5.0 * kPi * x + shift);
    if (x < 0.8) return 2.6 + 12.0 * (x - 0.55) * (1.0 + 0.2 * c);
    return -2.0 + 0.3 * std::sin(10.0 * kPi * x + shift);
}

double jumpImage(double x, double y, int c) {
    const double shift = 0.41 * c;
    double v = 0.5 + 1.2 * std::sin(2.0 * kPi * x + shift) * std::cos(kPi * y);
    const double d1 = std::hypot(x - 0.35, y - 0.4);
    const double d2 = std::hypot((x - 0.72) / 0.6, (y - 0.7) / 1.2);
    if (d1 < 0.2) v += 2.0 + 0.5 * std::cos(8.0 * kPi * d1);
    if (d2 < 0.15) v -= 1.8;
    return v;
}

double field(PhantomKind kind, const Shape& shape, std::size_t i, int c) {
    const auto [x, y] = coords(shape, i);
    switch (kind) {
        case PhantomKind::Constant: return 0.7 + 0.3 * c;
        case PhantomKind::Ramp: {
            const MultiIndex s = shape.site(i);
            double v = -0.5 + 0.2 * c + (4.0 * kPi / shape.dim(0)) * s[0];
            if (shape.rank() > 1) v += (2.0 * kPi / shape.dim(1)) * s[1];
            return v;
        }
        case PhantomKind::SmoothJumps: return shape.rank() == 1 ? jumpSignal(x, c) : jumpImage(x, y, c);
    }
    return 0.0;
}

Eigen::Matrix3d rotation(double a, double b) {
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d rx = Eigen::AngleAxisd(b, Eigen::Vector3d::UnitX()).toRotationMatrix();
    return rz * rx;
}

}  // namespace

Grid<Circle> makePhantom(PhantomKind kind, const Shape& shape, const Circle& m) {
    checkPhantomShape(shape);
    std::vector<double> pts(shape.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = Circle::wrap(field(kind, shape, i, 0));
    return Grid<Circle>(m, shape, std::move(pts));
}

Grid<Sphere> makePhantom(PhantomKind kind, const Shape& shape, const Sphere& m) {
    checkPhantomShape(shape);
    std::vector<Eigen::Vector3d> pts(shape.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (kind == PhantomKind::Ramp && shape.rank() == 1) {
            // Constant-speed great circle through a tilted plane.
            const Eigen::Vector3d e1 = Eigen::Vector3d(1, 1, 0).normalized();
            const Eigen::Vector3d e2 = Eigen::Vector3d(-1, 1, 1).normalized();
            const double t = field(kind, shape, i, 0);
            pts[i] = std::cos(t) * e1 + std::sin(t) * e2;
            continue;
        }
        const double polar = 1.4 + 0.35 * std::tanh(field(kind, shape, i, 0) - 0.5);
        const double azimuth = 0.8 * field(kind, shape, i, 1);
        pts[i] = Eigen::Vector3d(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
    }
    return Grid<Sphere>(m, shape, std::move(pts));
}

Grid<Spd3> makePhantom(PhantomKind kind, const Shape& shape, const Spd3& m) {
    checkPhantomShape(shape);
    std::vector<Eigen::Matrix3d> pts(shape.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double a = field(kind, shape, i, 0), b = field(kind, shape, i, 1);
        auto eig = [](double v, double lo, double hi) { return lo + (hi - lo) * 0.5 * (1.0 + std::tanh(0.6 * v)); };
        Eigen::Vector3d lambda(eig(a, 1.2, 4.5), eig(b, 0.5, 1.6), eig(-a, 0.4, 0.9));
        const Eigen::Matrix3d r = rotation(0.6 * a, 0.3 * b);
        pts[i] = sym3::symmetrize(r * lambda.asDiagonal() * r.transpose());
    }
    return Grid<Spd3>(m, shape, std::move(pts));
}

Grid<EuclideanN> makePhantom(PhantomKind kind, const Shape& shape, const EuclideanN& m) {
    checkPhantomShape(shape);
    std::vector<Eigen::VectorXd> pts(shape.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].resize(m.dim());
        for (int c = 0; c < m.dim(); ++c) pts[i][c] = field(kind, shape, i, c);
    }
    return Grid<EuclideanN>(m, shape, std::move(pts));
}

}  // namespace mvw
