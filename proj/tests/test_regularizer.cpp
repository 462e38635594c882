#include <doctest.h>

#include "mvw/regularizer.hpp"
#include "test_support.hpp"

using namespace mvw;
using testing::Rng;

namespace {

template <class M>
WaveletRegularizer<M> makeReg(const M& m, const Shape& shape, int levels, MaskKind kind, RegParams params,
                              BoundaryRule rule = BoundaryRule::reflect()) {
    params.domainDim = shape.rank();
    return WaveletRegularizer<M>(m, shape, levels, makeMask(kind, shape.rank()), rule, params);
}

template <class M>
std::vector<typename M::Point> randomLocal(const M& m, std::size_t n, double spread, Rng& rng) {
    const auto c = testing::randomPoint(m, rng);
    std::vector<typename M::Point> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back(testing::randomNear(m, c, spread, rng));
    return pts;
}

/// Combined directional derivative check of an atom's gradient.
template <class M>
double gradientError(const WaveletRegularizer<M>& reg, const RegAtom& atom, const std::vector<typename M::Point>& x,
                     Rng& rng) {
    const auto& m = reg.manifold();
    bool diff = true;
    const auto g = reg.localGradient(atom, x, diff);
    REQUIRE(diff);
    std::vector<typename M::Vec> dir;
    double analytic = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dir.push_back(testing::randomTangentOfLength(m, x[i], 1.0, rng));
        analytic += m.inner(x[i], g[i], dir[i]);
        scale += m.norm(x[i], g[i]);
    }
    auto shifted = [&](double t) {
        std::vector<typename M::Point> y;
        for (std::size_t i = 0; i < x.size(); ++i) y.push_back(m.exp(x[i], t * dir[i]));
        return reg.localValue(atom, y);
    };
    const double h = 1e-5;
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    return std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-2 * scale, 1e-10});
}

template <class M>
void checkGradients(const M& m, const Shape& shape, MaskKind kind, double spread, std::uint64_t seed) {
    Rng rng(seed);
    int count = 0;
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
        const auto reg = makeReg(m, shape, 2, kind, {0.7, 0.3, 1.0, q, 1});
        for (int trial = 0; trial < 30; ++trial) {
            const auto& atom = reg.atoms()[rng.gen() % reg.atoms().size()];
            const auto x = randomLocal(m, atom.sources.size() + 1, spread, rng);
            INFO(m.tag(), " q=", q, " level=", atom.level);
            CHECK(gradientError(reg, atom, x, rng) <= 1e-4);
            ++count;
        }
    }
    CHECK(count >= 100);
}

/// Prox inequality on random local configurations for every atom kind.
template <class M>
void checkProxInequality(const M& m, const Shape& shape, MaskKind kind, double spread, std::uint64_t seed) {
    Rng rng(seed);
    int count = 0;
    for (double q : {0.0, 1.0, 2.0, 1.5}) {
        const auto reg = makeReg(m, shape, 2, kind, {0.5, 0.4, 1.0, q, 1});
        for (int trial = 0; trial < 40; ++trial) {
            const auto& atom = reg.atoms()[rng.gen() % reg.atoms().size()];
            auto u = testing::randomGrid(m, shape, spread, rng).points;
            const auto before = reg.gather(u, atom);
            const double mu = rng.uniform(0.05, 2.0);
            const AtomOutcome o = reg.prox(u, atom, mu);
            CHECK_FALSE(o.skipped);
            const auto after = reg.gather(u, atom);
            const double lhs = reg.proxObjective(before, after, atom, mu);
            const double rhs = reg.localValue(atom, before);
            INFO(m.tag(), " q=", q, " level=", atom.level, " mu=", mu);
            CHECK(lhs <= rhs + 1e-10 * (1.0 + rhs));
            ++count;
        }
    }
    CHECK(count >= 100);
}

}  // namespace

TEST_CASE("atom layout and conflicts") {
    const Circle c;
    const auto reg = makeReg(c, Shape({16}), 2, MaskKind::DD3, {1.0, 1.0, 1.0, 1.0, 1});
    std::size_t pairs = 0, details = 0;
    for (const auto& a : reg.atoms()) (a.kind == RegAtom::Kind::CoarsePair ? pairs : details)++;
    CHECK(pairs == 3);
    CHECK(details == 4 + 8);
    CHECK(reg.atoms().front().kind == RegAtom::Kind::CoarsePair);
    CHECK(reg.atoms().back().level == 2);
    const auto& a = reg.atoms()[pairs];
    CHECK(atomsConflict(a, a));
    const auto& last = reg.atoms().back();
    CHECK(atomsConflict(a, reg.atoms()[pairs + 1]) == sitesIntersect(a.touched, reg.atoms()[pairs + 1].touched));
    CHECK_FALSE(atomsConflict(reg.atoms()[0], last));

    const auto periodic =
        makeReg(c, Shape({16}), 2, MaskKind::DD3, {1.0, 1.0, 1.0, 1.0, 1}, BoundaryRule::periodic());
    std::size_t wrapped = 0;
    for (const auto& x : periodic.atoms()) wrapped += x.kind == RegAtom::Kind::CoarsePair;
    CHECK(wrapped == 4);
    const auto noPairs = makeReg(c, Shape({16}), 2, MaskKind::DD3, {1.0, 0.0, 1.0, 1.0, 1});
    CHECK(noPairs.atoms().size() == 12);
}

TEST_CASE("atom values") {
    const Sphere s;
    Rng rng(1);
    const auto reg = makeReg(s, Shape({8, 8}), 2, MaskKind::DD3, {1.0, 1.0, 0.5, 1.0, 2});
    const auto constant = Grid<Sphere>::filled(s, Shape({8, 8}), testing::randomPoint(s, rng));
    for (const auto& a : reg.atoms()) CHECK(reg.value(constant, a) <= 1e-12);

    const Circle c;
    const auto one = makeReg(c, Shape({8}), 1, MaskKind::FirstOrder, {1.0, 0.0, 1.0, 1.0, 1});
    CHECK(one.detailWeight(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    std::vector<double> u{0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    // Site 1 predicted by the mean of its neighbours (0): |d| = 0.3 / sqrt(2).
    CHECK(one.value(u, one.atoms()[0]) == doctest::Approx(std::sqrt(2.0) * 0.3 / std::sqrt(2.0)).epsilon(1e-12));

    const auto l0 = makeReg(c, Shape({8}), 1, MaskKind::FirstOrder, {2.0, 3.0, 1.0, 0.0, 1});
    const auto& pair = l0.atoms()[0];
    REQUIRE(pair.kind == RegAtom::Kind::CoarsePair);
    std::vector<double> flat(8, 0.4);
    CHECK(l0.value(flat, pair) == 0.0);
    flat[pair.target] = 0.5;
    CHECK(l0.value(flat, pair) == 3.0);
    CHECK(l0.value(flat, l0.atoms().back()) == 0.0);

    // Isometry invariance on the sphere.
    const auto g = testing::randomGrid(s, Shape({8, 8}), 0.5, rng);
    auto rotated = g;
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.2, -1, 0.5).normalized()).toRotationMatrix();
    for (auto& p : rotated.points) p = rot * p;
    for (std::size_t i = 0; i < reg.atoms().size(); i += 7)
        CHECK(reg.value(g, reg.atoms()[i]) == doctest::Approx(reg.value(rotated, reg.atoms()[i])).epsilon(1e-8));
}

TEST_CASE("Euclidean first-order q=2 detail gradient equals the quadratic form gradient") {
    const EuclideanN m(1);
    const auto reg = makeReg(m, Shape({8}), 1, MaskKind::FirstOrder, {1.3, 0.0, 0.5, 2.0, 1});
    const auto& atom = reg.atoms()[1];
    REQUIRE(atom.sources.size() == 2);
    const std::vector<Eigen::VectorXd> x{m.point({0.2}), m.point({-0.4}), m.point({0.9})};
    bool diff = true;
    const auto g = reg.localGradient(atom, x, diff);
    const double c = reg.distanceWeight(1);
    const double r = 0.9 - 0.5 * (0.2 - 0.4);
    CHECK(g[2][0] == doctest::Approx(2 * c * r).epsilon(1e-14));
    CHECK(g[0][0] == doctest::Approx(-c * r).epsilon(1e-14));
    CHECK(g[1][0] == doctest::Approx(-c * r).epsilon(1e-14));

    const std::vector<Eigen::VectorXd> same{m.point({0.5}), m.point({0.5}), m.point({0.5})};
    for (const auto& v : reg.localGradient(atom, same, diff)) CHECK(v.norm() == 0.0);
    CHECK(diff);
}

TEST_CASE("detail and pair gradients match central differences") {
    checkGradients(Sphere{}, Shape({8, 8}), MaskKind::DD3, 0.5, 2);
    checkGradients(Spd3{}, Shape({8}), MaskKind::DD3, 0.6, 3);
    checkGradients(Circle{}, Shape({16}), MaskKind::FirstOrder, 0.8, 4);
    checkGradients(EuclideanN(2), Shape({8, 8}), MaskKind::DD3, 1.0, 5);
}

TEST_CASE("coarse pair gradients") {
    const EuclideanN m(2);
    RegParams p{0.0, 0.7, 1.0, 2.0, 1};
    const auto reg = makeReg(m, Shape({8}), 1, MaskKind::FirstOrder, p);
    const auto& atom = reg.atoms()[0];
    REQUIRE(atom.kind == RegAtom::Kind::CoarsePair);
    const std::vector<Eigen::VectorXd> x{m.point({1, 2}), m.point({0.5, -1})};
    bool diff = true;
    const auto g = reg.localGradient(atom, x, diff);
    CHECK((g[0] - 2 * 0.7 * (x[0] - x[1])).norm() <= 1e-14);
    const std::vector<Eigen::VectorXd> eq{x[0], x[0]};
    CHECK(reg.localGradient(atom, eq, diff)[0].norm() == 0.0);
    CHECK(diff);

    const Circle c;
    const auto creg = makeReg(c, Shape({8}), 1, MaskKind::FirstOrder, {0.0, 0.7, 1.0, 1.0, 1});
    const std::vector<double> cx{0.3, 1.0};
    const auto cg = creg.localGradient(creg.atoms()[0], cx, diff);
    CHECK(cg[0] == doctest::Approx(-0.7));
    CHECK(cg[1] == doctest::Approx(0.7));
    const std::vector<double> ceq{0.3, 0.3};
    creg.localGradient(creg.atoms()[0], ceq, diff);
    CHECK_FALSE(diff);
}

TEST_CASE("coarse pair prox closed forms") {
    const EuclideanN m(1);
    Rng rng(6);
    const auto reg = makeReg(m, Shape({4}), 1, MaskKind::FirstOrder, {0.0, 0.8, 1.0, 1.0, 1});
    const auto& atom = reg.atoms()[0];
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Eigen::VectorXd> u(4, m.point({0.0}));
        u[atom.sources[0]] = m.point({rng.normal()});
        u[atom.target] = m.point({rng.normal()});
        const double mu = rng.uniform(0.01, 2.0);
        const double diff0 = u[atom.target][0] - u[atom.sources[0]][0];
        const double mid = 0.5 * (u[atom.target][0] + u[atom.sources[0]][0]);
        reg.prox(u, atom, mu);
        const double diff1 = u[atom.target][0] - u[atom.sources[0]][0];
        const double t = 2 * mu * 0.8;
        const double soft = std::abs(diff0) <= t ? 0.0 : diff0 - std::copysign(t, diff0);
        CHECK(diff1 == doctest::Approx(soft).epsilon(1e-12).scale(1.0));
        CHECK(0.5 * (u[atom.target][0] + u[atom.sources[0]][0]) == doctest::Approx(mid).epsilon(1e-12));
    }

    const Sphere s;
    const auto sreg = makeReg(s, Shape({4}), 1, MaskKind::FirstOrder, {0.0, 1.0, 1.0, 1.0, 1});
    const auto& sa = sreg.atoms()[0];
    std::vector<Eigen::Vector3d> su(4, Eigen::Vector3d(0, 0, 1));
    su[sa.target] = Eigen::Vector3d(1, 0, 0);
    sreg.prox(su, sa, 2.0);
    CHECK((su[sa.target] - Eigen::Vector3d(1, 0, 1).normalized()).norm() <= 1e-12);
    CHECK((su[sa.sources[0]] - su[sa.target]).norm() <= 1e-12);
    const auto frozen = su;
    sreg.prox(su, sa, 2.0);
    CHECK(su == frozen);
}

TEST_CASE("l0 coarse pair prox") {
    const Circle c;
    const double mu = 0.5, l2 = 0.08;
    const auto reg = makeReg(c, Shape({4}), 1, MaskKind::FirstOrder, {0.0, l2, 1.0, 0.0, 1});
    const auto& atom = reg.atoms()[0];
    const double unit = std::sqrt(mu * l2);
    std::vector<double> u(4, 0.1);
    reg.prox(u, atom, mu);
    CHECK(u == std::vector<double>(4, 0.1));

    u[atom.target] = 0.1 + 3 * unit;
    const auto keep = u;
    reg.prox(u, atom, mu);
    CHECK(u == keep);

    u[atom.target] = 0.1 + unit;
    const auto before = reg.gather(u, atom);
    reg.prox(u, atom, mu);
    CHECK(u[atom.target] == doctest::Approx(0.1 + 0.5 * unit));
    CHECK(u[atom.sources[0]] == doctest::Approx(0.1 + 0.5 * unit));
    const auto after = reg.gather(u, atom);
    CHECK(reg.proxObjective(before, after, atom, mu) < reg.localValue(atom, before));
}

TEST_CASE("Euclidean l1 detail prox equals block soft-thresholding") {
    const EuclideanN m(2);
    Rng rng(7);
    for (MaskKind kind : {MaskKind::FirstOrder, MaskKind::DD3}) {
        const auto reg = makeReg(m, Shape({16}), 2, kind, {0.9, 0.0, 1.0, 1.0, 1});
        for (int trial = 0; trial < 40; ++trial) {
            const auto& atom = reg.atoms()[rng.gen() % reg.atoms().size()];
            auto u = testing::randomGrid(m, Shape({16}), 1.0, rng).points;
            const double mu = rng.uniform(0.05, 1.0);
            const auto x0 = reg.gather(u, atom);
            reg.prox(u, atom, mu);
            const auto x1 = reg.gather(u, atom);

            // Linear oracle: the detail y - sum w_k a_k is block soft-thresholded by mu*c*beta.
            const std::size_t k = atom.sources.size();
            double beta = 1.0;
            Eigen::VectorXd d0 = x0[k];
            for (std::size_t i = 0; i < k; ++i) {
                beta += atom.weights[i] * atom.weights[i];
                d0 -= atom.weights[i] * x0[i];
            }
            const double thr = mu * reg.distanceWeight(atom.level) * beta;
            const Eigen::VectorXd d1 = d0.norm() <= thr ? Eigen::VectorXd::Zero(2) : Eigen::VectorXd(d0 * (1 - thr / d0.norm()));
            const Eigen::VectorXd shift = (d0 - d1) / beta;
            for (std::size_t i = 0; i < k; ++i) CHECK((x1[i] - (x0[i] + atom.weights[i] * shift)).norm() <= 1e-6);
            CHECK((x1[k] - (x0[k] - shift)).norm() <= 1e-6);
        }
    }
}

TEST_CASE("detail prox leaves a zero detail alone") {
    const Sphere s;
    Rng rng(8);
    for (double q : {0.0, 1.0, 2.0}) {
        const auto reg = makeReg(s, Shape({8}), 1, MaskKind::DD3, {1.0, 0.0, 1.0, q, 1});
        const auto coarse = testing::randomGrid(s, Shape({4}), 0.4, rng);
        auto u = subdivide(coarse, makeMask(MaskKind::DD3, 1), BoundaryRule::reflect()).points;
        const auto before = u;
        for (const auto& a : reg.atoms()) reg.prox(u, a, 0.7);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK((u[i] - before[i]).norm() <= 1e-12);
    }
}

TEST_CASE("l0 detail prox decisions match an exhaustive oracle") {
    const EuclideanN m(1);
    Rng rng(9);
    const double lambda = 0.3;
    const auto reg = makeReg(m, Shape({16}), 2, MaskKind::DD3, {lambda, 0.0, 1.0, 0.0, 1});
    int annihilated = 0, kept = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto& atom = reg.atoms()[rng.gen() % reg.atoms().size()];
        auto u = testing::randomGrid(m, Shape({16}), 1.0, rng).points;
        const double mu = rng.uniform(0.1, 1.0);
        const auto x0 = reg.gather(u, atom);
        const std::size_t k = atom.sources.size();
        double beta = 1.0, d0 = x0[k][0];
        for (std::size_t i = 0; i < k; ++i) {
            beta += atom.weights[i] * atom.weights[i];
            d0 -= atom.weights[i] * x0[i][0];
        }
        // Exhaustive search over the post-prox detail value on a 10^4 grid (plus zero and d0).
        double bestCost = lambda, bestDetail = d0;
        for (int j = 0; j <= 10000; ++j) {
            const double cand = j == 10000 ? 0.0 : -2.0 * std::abs(d0) + 4.0 * std::abs(d0) * j / 9999.0;
            const double cost = (d0 - cand) * (d0 - cand) / (2 * mu * beta) + (cand != 0.0 ? lambda : 0.0);
            if (cost < bestCost) bestCost = cost, bestDetail = cand;
        }
        const bool oracleAnnihilates = bestDetail == 0.0;
        reg.prox(u, atom, mu);
        const auto x1 = reg.gather(u, atom);
        double d1 = x1[k][0];
        for (std::size_t i = 0; i < k; ++i) d1 -= atom.weights[i] * x1[i][0];
        CHECK((std::abs(d1) <= 1e-8) == oracleAnnihilates);
        (oracleAnnihilates ? annihilated : kept)++;
    }
    CHECK(annihilated > 20);
    CHECK(kept > 20);

    // A vanishing weight never pays for moving; a dominant weight always annihilates.
    const auto tiny = makeReg(m, Shape({16}), 2, MaskKind::DD3, {1e-12, 0.0, 1.0, 0.0, 1});
    const auto huge = makeReg(m, Shape({16}), 2, MaskKind::DD3, {1e12, 0.0, 1.0, 0.0, 1});
    auto u = testing::randomGrid(m, Shape({16}), 1.0, rng).points;
    const auto& atom = tiny.atoms().back();
    const double before = tiny.detail(u, atom).vec.norm();
    REQUIRE(before > 1e-3);
    auto v = u;
    tiny.prox(u, atom, 0.5);
    CHECK(tiny.detail(u, atom).vec.norm() == doctest::Approx(before).epsilon(1e-12));
    huge.prox(v, atom, 0.5);
    CHECK(huge.detail(v, atom).vec.norm() <= 1e-8);
}

TEST_CASE("every prox satisfies the prox inequality") {
    checkProxInequality(Sphere{}, Shape({8, 8}), MaskKind::DD3, 0.5, 10);
    checkProxInequality(Spd3{}, Shape({16}), MaskKind::DD3, 0.6, 11);
    checkProxInequality(Circle{}, Shape({16}), MaskKind::FirstOrder, 1.0, 12);
    checkProxInequality(EuclideanN(3), Shape({16}), MaskKind::DD3, 1.0, 13);
}
