#include <doctest.h>

#include "mvw/mean.hpp"
#include "test_support.hpp"

using namespace mvw;
using testing::Rng;

namespace {

template <class M>
typename M::Point meanOf(const M& m, const std::vector<typename M::Point>& pts, const std::vector<double>& w) {
    return intrinsicMean(m, std::span<const typename M::Point>(pts), std::span<const double>(w));
}

std::vector<double> randomWeights(Rng& rng, std::size_t n, bool dd) {
    if (dd && n == 4) return {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) sum += (x = rng.uniform(0.1, 1.0));
    for (auto& x : w) x /= sum;
    double fix = 1.0;
    for (std::size_t i = 1; i < n; ++i) fix -= w[i];
    w[0] = fix;
    return w;
}

/// Central differences of the mean map against the analytic derivative.
template <class M>
void checkDerivatives(const M& m, std::uint64_t seed, double spread) {
    Rng rng(seed);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto center = testing::randomPoint(m, rng);
        const std::size_t n = 2 + trial % 4;
        std::vector<typename M::Point> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(testing::randomNear(m, center, spread, rng));
        const auto w = randomWeights(rng, n, trial % 2 == 0);
        const auto mean = meanOf(m, pts, w);
        MeanLinearization<M> lin(m, pts, w, mean);
        const std::size_t k = trial % n;
        const typename M::Vec dir = testing::randomTangentOfLength(m, pts[k], 1.0, rng);
        const double h = 1e-5;
        auto plus = pts, minus = pts;
        plus[k] = m.exp(pts[k], h * dir);
        minus[k] = m.exp(pts[k], -h * dir);
        const typename M::Vec fd = (1.0 / (2.0 * h)) * (m.log(mean, meanOf(m, plus, w)) - m.log(mean, meanOf(m, minus, w)));
        const typename M::Vec analytic = lin.derivative(k, dir);
        CHECK(testing::tangentRelativeError(m, mean, fd, analytic, 1e-6) <= 1e-4);

        const typename M::Vec g = testing::randomTangent(m, mean, rng);
        CHECK(m.inner(pts[k], lin.pullback(k, g), dir) ==
              doctest::Approx(m.inner(mean, g, analytic)).epsilon(1e-9).scale(1.0));
        ++checked;
    }
    CHECK(checked == 100);
}

}  // namespace

TEST_CASE("midpoints, repeated points and singletons") {
    Sphere s;
    const Eigen::Vector3d a(1, 0, 0), b(0, 1, 0);
    const auto mid = meanOf(s, {a, b}, {0.5, 0.5});
    CHECK((mid - Eigen::Vector3d(1, 1, 0).normalized()).norm() <= 1e-12);

    Spd3 spd;
    Rng rng(1);
    const auto p = testing::randomPoint(spd, rng);
    CHECK(spd.dist(meanOf(spd, {p, p, p}, {-0.5, 0.75, 0.75}), p) <= 1e-12);
    CHECK(spd.dist(meanOf(spd, {p}, {1.0}), p) <= 1e-12);

    Circle c;
    CHECK(meanOf(c, {3.0, -3.0}, {0.5, 0.5}) == doctest::Approx(M_PI));
}

TEST_CASE("circle weights without a stationary point use the unwrapped combination") {
    // The negatively weighted last sample lies just past the antipode of the
    // others, so the energy's minimum sits on a kink and no stationary point exists.
    Circle c;
    const std::vector<double> pts{-0.978235, -1.0, -0.853235, 2.35607};
    const std::vector<double> w{-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
    double expected = -1.0;
    for (int j = 0; j < 4; ++j) {
        double d = pts[j] + 1.0;
        if (d > M_PI) d -= 2 * M_PI;
        expected += w[j] * d;
    }
    CHECK(meanOf(c, pts, w) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("weights must be affine and not all zero") {
    Circle c;
    CHECK_THROWS_AS(meanOf(c, {0.0, 1.0}, {0.5, 0.6}), Error);
    CHECK_THROWS_AS(meanOf(c, {0.0}, {0.0}), Error);
}

TEST_CASE("Euclidean mean is the weighted average") {
    EuclideanN m(3);
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::VectorXd> pts;
        for (int i = 0; i < 4; ++i) pts.push_back(testing::randomPoint(m, rng));
        const auto w = randomWeights(rng, 4, trial % 2 == 0);
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(3);
        for (int i = 0; i < 4; ++i) expected += w[i] * pts[i];
        CHECK((meanOf(m, pts, w) - expected).norm() <= 1e-12);
        MeanLinearization<EuclideanN> lin(m, pts, w, expected);
        const auto v = testing::randomPoint(m, rng);
        CHECK((lin.derivative(1, v) - w[1] * v).norm() <= 1e-12);
        CHECK((lin.applyL(v) + v).norm() <= 1e-12);
    }
}

TEST_CASE("Deslauriers-Dubuc weights on the sphere match a brute-force minimizer") {
    Sphere s;
    const Eigen::Vector3d base = Eigen::Vector3d(0.3, -0.2, 1.0).normalized();
    const Eigen::Vector3d dir = Sphere::project(base, Eigen::Vector3d(1, 0.4, 0)).normalized();
    const std::vector<double> ts{-0.35, -0.1, 0.12, 0.4};
    std::vector<Eigen::Vector3d> pts;
    for (double t : ts) pts.push_back(s.exp(base, t * dir));
    const std::vector<double> w{-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
    const auto mean = meanOf(s, pts, w);

    // Independent oracle: dense grid over a tangent chart at the base point, then zoomed grids.
    const Eigen::Vector3d e1 = dir, e2 = base.cross(dir);
    auto energy = [&](double x, double y) {
        const Eigen::Vector3d v = (base + x * e1 + y * e2).normalized();
        double f = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double d = std::atan2(v.cross(pts[j]).norm(), v.dot(pts[j]));
            f += w[j] * d * d;
        }
        return f;
    };
    double cx = 0.0, cy = 0.0, radius = 0.5;
    for (int round = 0; round < 12; ++round) {
        double best = energy(cx, cy), bx = cx, by = cy;
        const int n = 50;
        for (int i = -n; i <= n; ++i)
            for (int j = -n; j <= n; ++j) {
                const double x = cx + radius * i / n, y = cy + radius * j / n;
                const double f = energy(x, y);
                if (f < best) best = f, bx = x, by = y;
            }
        cx = bx, cy = by;
        radius *= 0.1;
    }
    const Eigen::Vector3d oracle = (base + cx * e1 + cy * e2).normalized();
    CHECK(s.dist(mean, oracle) <= 1e-6);
}

TEST_CASE("mean derivative matches central differences") {
    checkDerivatives(Circle{}, 21, 0.5);
    checkDerivatives(Sphere{}, 22, 0.4);
    checkDerivatives(Spd3{}, 23, 0.5);
    checkDerivatives(EuclideanN(2), 24, 1.0);
}

TEST_CASE("coincident points: moving one point moves the midpoint by half") {
    Sphere s;
    const Eigen::Vector3d p(0, 0, 1);
    const std::vector<Eigen::Vector3d> pts{p, p};
    const std::vector<double> w{0.5, 0.5};
    const Eigen::Vector3d v(0.3, -0.4, 0);
    const auto d = meanDerivative(s, WeightedMeanProblem<Sphere>{pts, w}, p, 0, v);
    CHECK(d.norm() == doctest::Approx(0.5 * v.norm()).epsilon(1e-3));
}

TEST_CASE("Jacobi factors") {
    CHECK(jacobiBoundaryFactor(0.0, 1.3) == 1.0);
    CHECK(jacobiBoundaryFactor(1.0, M_PI / 2) == doctest::Approx(M_PI / 2).epsilon(1e-14));
    CHECK(jacobiBoundaryFactor(-1.0, 1.0) == doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-14));
    CHECK(jacobiEndpointFactor(0.0, 0.7) == -1.0);
    CHECK(jacobiEndpointFactor(1.0, 1.0) == doctest::Approx(-std::cos(1.0) / std::sin(1.0)).epsilon(1e-14));
    CHECK(jacobiEndpointFactor(-4.0, 0.5) == doctest::Approx(-std::cosh(1.0) / std::sinh(1.0)).epsilon(1e-14));
    CHECK(jacobiBoundaryFactor(1e-6, 1e-3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(jacobiBoundaryFactor(1.0, M_PI), Error);
}

TEST_CASE("adjoint of R_k on flat and curved frames") {
    EuclideanN m(2);
    const Eigen::VectorXd p = m.point({0, 0}), q = m.point({1, 2});
    const auto frame = m.jacobiFrame(p, q);
    const Eigen::VectorXd w = m.point({0.3, -0.7});
    CHECK((adjointRk(m, frame, q, 0.25, w) - 0.25 * w).norm() <= 1e-14);
    CHECK(adjointRk(m, frame, q, 0.25, m.zero(q)).norm() == 0.0);

    Sphere s;
    const Eigen::Vector3d a(0, 0, 1), b(1, 0, 0);
    const auto sf = s.jacobiFrame(a, b);
    const Eigen::Vector3d normal = s.transport(a, b, sf.modes[1].direction);
    CHECK((adjointRk(s, sf, b, 1.0, normal) - (M_PI / 2) * sf.modes[1].direction).norm() <= 1e-12);

    Circle c;
    const std::vector<double> cp{0.1, 0.4, -0.2};
    const std::vector<double> cw{0.2, 0.5, 0.3};
    const double cm = meanOf(c, cp, cw);
    CHECK(solveAdjointL(c, WeightedMeanProblem<Circle>{cp, cw}, cm, 0.7) == doctest::Approx(-0.7));
}

TEST_CASE("SPD3 L operator is self-adjoint and means are congruence equivariant") {
    Spd3 m;
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto center = testing::randomPoint(m, rng);
        std::vector<Eigen::Matrix3d> pts;
        for (int i = 0; i < 3; ++i) pts.push_back(testing::randomNear(m, center, 0.6, rng));
        const std::vector<double> w{0.2, 0.5, 0.3};
        const auto mean = meanOf(m, pts, w);
        MeanLinearization<Spd3> lin(m, pts, w, mean);
        const auto a = testing::randomTangent(m, mean, rng), b = testing::randomTangent(m, mean, rng);
        CHECK(m.inner(mean, lin.applyL(a), b) == doctest::Approx(m.inner(mean, a, lin.applyL(b))).epsilon(1e-10));
        CHECK((lin.matrix() - lin.matrix().transpose()).norm() <= 1e-10);

        Eigen::Matrix3d g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
        g += 2.5 * Eigen::Matrix3d::Identity();
        std::vector<Eigen::Matrix3d> moved;
        for (const auto& p : pts) moved.push_back(g.transpose() * p * g);
        CHECK(m.dist(meanOf(m, moved, w), g.transpose() * mean * g) <= 1e-8);
    }
}
