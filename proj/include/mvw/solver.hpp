#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mvw/atoms.hpp"
#include "mvw/dataterm.hpp"
#include "mvw/grid.hpp"
#include "mvw/regularizer.hpp"

namespace mvw {

struct CoolingSchedule {
    enum class Kind { PowerLaw, Stagewise };
    Kind kind = Kind::PowerLaw;
    /// Exponent of the power law mu0 * n^-tau.
    double tau = 1.0;

    /// Step size for outer iteration n >= 1.
    double mu(int n, double mu0) const;
    std::string describe() const;
};

enum class Scheme { Auto, GFB, CPPA };
enum class SmoothBlock { Auto, Data, Regularizer };
enum class SweepOrder { Lexicographic, Colored };

const char* toString(Scheme s);
const char* toString(SmoothBlock s);
const char* toString(SweepOrder s);
Scheme parseScheme(const std::string& s);
SmoothBlock parseSmoothBlock(const std::string& s);
SweepOrder parseSweepOrder(const std::string& s);

struct SolverConfig {
    Scheme scheme = Scheme::Auto;
    int iterations = 200;
    double mu0 = 1.0;
    CoolingSchedule cooling;
    SweepOrder order = SweepOrder::Lexicographic;
    bool parallelBatches = false;
    SmoothBlock smooth = SmoothBlock::Auto;
};

struct TraceRow {
    int iteration = 0;
    double mu = 0.0;
    double data = 0.0;
    double reg = 0.0;
    double total = 0.0;
};

struct RunFlags {
    std::size_t skippedAtoms = 0;
    std::size_t stalledProxes = 0;
    std::size_t lineSearchFailures = 0;
    std::size_t nonDifferentiable = 0;
    std::vector<std::string> messages;  // first few skip reasons

    void add(const AtomOutcome& o);
};

template <class M>
struct RunReport {
    Grid<M> result;
    std::vector<TraceRow> trace;
    RunFlags flags;
    double wallSeconds = 0.0;
    Scheme scheme = Scheme::Auto;
    SmoothBlock smooth = SmoothBlock::Auto;
};

/// Denoising / deconvolution problem: minimize sum_i dist(A(u)_i, f_i)^p + W(u).
template <class M>
struct Problem {
    Grid<M> observations;
    ImagingOperator op;
    double p = 2.0;
    int levels = 1;
    MaskKind mask = MaskKind::DD3;
    BoundaryRule boundary = BoundaryRule::reflect();
    RegParams reg;
    std::optional<Grid<M>> init;
};

/// Scheme and smooth block after resolving Auto, validated against the problem.
struct ResolvedScheme {
    Scheme scheme;
    SmoothBlock smooth;
};
ResolvedScheme resolveScheme(const SolverConfig& config, double p, double q, bool dataHasProx);

/// Greedy runs of consecutive, pairwise non-conflicting atoms.
std::vector<std::vector<std::size_t>> buildBatches(const std::vector<const std::vector<std::size_t>*>& touched,
                                                   const std::vector<std::size_t>& order, std::size_t siteCount);

/// Order atoms by group, then by greedy colour within the group, then by index.
std::vector<std::size_t> coloredOrder(const std::vector<const std::vector<std::size_t>*>& touched,
                                      const std::vector<int>& groups, std::size_t siteCount);

template <class M>
struct TrajectoryResult {
    std::vector<typename M::Point> points;
    int substeps = 0;
    bool lineSearchFailed = false;
};

/// Replaces the explicit step x0 - mu grad F(x0) by a polygonal path of
/// line-searched sub-steps whose relative lengths add up to one.
template <class M>
TrajectoryResult<M> trajectoryStep(const M& m, std::vector<typename M::Point> x0,
                                   const std::function<double(const std::vector<typename M::Point>&)>& value,
                                   const std::function<std::vector<typename M::Vec>(const std::vector<typename M::Point>&)>& gradient,
                                   double mu, int maxSubsteps = 50) {
    using Points = std::vector<typename M::Point>;
    using Vec = typename M::Vec;
    TrajectoryResult<M> out;
    Points x = std::move(x0);
    const std::size_t n = x.size();
    auto move = [&](const Points& from, const std::vector<Vec>& g, double s) {
        Points y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = m.exp(from[i], -s * g[i]);
        return y;
    };
    auto safeValue = [&](const Points& p) {
        try {
            const double v = value(p);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double used = 0.0;
    for (int sub = 0; sub < maxSubsteps; ++sub) {
        const std::vector<Vec> g = gradient(x);
        double gg = 0.0;
        for (std::size_t i = 0; i < n; ++i) gg += m.inner(x[i], g[i], g[i]);
        if (gg == 0.0) break;
        const double f0 = safeValue(x);
        auto phi = [&](double s) { return safeValue(move(x, g, s)); };

        // Golden-section search on [0, 2 mu] with 12 probes, then a parabolic refinement.
        const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = 0.0, b = 2.0 * mu;
        double c = b - golden * (b - a), d = a + golden * (b - a);
        double fc = phi(c), fd = phi(d);
        std::vector<std::pair<double, double>> probes{{0.0, f0}, {c, fc}, {d, fd}};
        for (int k = 2; k < 12; ++k) {
            if (fc <= fd) {
                b = d, d = c, fd = fc;
                c = b - golden * (b - a);
                fc = phi(c);
                probes.emplace_back(c, fc);
            } else {
                a = c, c = d, fc = fd;
                d = a + golden * (b - a);
                fd = phi(d);
                probes.emplace_back(d, fd);
            }
        }
        std::sort(probes.begin(), probes.end());
        std::size_t best = 0;
        for (std::size_t k = 1; k < probes.size(); ++k)
            if (probes[k].second < probes[best].second) best = k;
        double sBest = probes[best].first, fBest = probes[best].second;
        if (best > 0 && best + 1 < probes.size()) {
            const auto [s0, f0p] = probes[best - 1];
            const auto [s1, f1] = probes[best];
            const auto [s2, f2] = probes[best + 1];
            const double num = (s1 - s0) * (s1 - s0) * (f1 - f2) - (s1 - s2) * (s1 - s2) * (f1 - f0p);
            const double den = (s1 - s0) * (f1 - f2) - (s1 - s2) * (f1 - f0p);
            if (den != 0.0) {
                const double sv = s1 - 0.5 * num / den;
                if (sv > 0.0 && sv <= 2.0 * mu) {
                    const double fv = phi(sv);
                    if (fv < fBest) sBest = sv, fBest = fv;
                }
            }
        }
        if (!(fBest < f0) || sBest == 0.0) {
            if (sub == 0) {
                out.lineSearchFailed = true;
                x = move(x, g, mu);
                out.substeps = 1;
            }
            break;
        }
        const double tau = sBest / mu;
        out.substeps = sub + 1;
        if (used + tau >= 1.0) {
            x = move(x, g, (1.0 - used) * mu);
            break;
        }
        x = move(x, g, sBest);
        used += tau;
    }
    out.points = std::move(x);
    return out;
}

namespace detail {

template <class Fn>
void runBatches(const std::vector<std::vector<std::size_t>>& batches, bool parallel, std::vector<AtomOutcome>& outcomes,
                Fn&& fn) {
    for (const auto& batch : batches) {
        const long count = static_cast<long>(batch.size());
        if (parallel && count > 1) {
#pragma omp parallel for schedule(static)
            for (long j = 0; j < count; ++j) outcomes[batch[j]] = fn(batch[j]);
        } else {
            for (long j = 0; j < count; ++j) outcomes[batch[j]] = fn(batch[j]);
        }
    }
}

}  // namespace detail

/// Generalized forward-backward (trajectory steps on the smooth block,
/// Gauss-Seidel updates) or cyclic proximal point iteration.
template <class M>
RunReport<M> runSolver(const Problem<M>& problem, const SolverConfig& config) {
    using Points = std::vector<typename M::Point>;
    const auto start = std::chrono::steady_clock::now();
    if (config.iterations < 0) throw Error(ErrorCode::InvalidArgument, "iteration count must be nonnegative");
    if (!(config.mu0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu0 must be positive");
    const M& m = problem.observations.manifold;
    const Shape& shape = problem.observations.shape;
    RegParams rp = problem.reg;
    rp.domainDim = shape.rank();
    const DataTerm<M> data(m, shape, problem.op, problem.p, problem.observations);
    const WaveletRegularizer<M> reg(m, shape, problem.levels, makeMask(problem.mask, shape.rank()), problem.boundary, rp);
    const ResolvedScheme resolved = resolveScheme(config, problem.p, rp.q, data.hasProx());
    if (resolved.scheme == Scheme::CPPA && config.cooling.kind == CoolingSchedule::Kind::PowerLaw &&
        !(config.cooling.tau > 0.5 && config.cooling.tau <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "CPPA needs a power-law exponent tau in (1/2, 1]");

    RunReport<M> report;
    report.scheme = resolved.scheme;
    report.smooth = resolved.smooth;
    Points u = problem.init ? problem.init->points : problem.observations.points;
    if (u.size() != shape.size()) throw Error(ErrorCode::InvalidArgument, "initial grid does not match the problem");

    const auto& dAtoms = data.atoms();
    const auto& rAtoms = reg.atoms();
    std::vector<const std::vector<std::size_t>*> dTouched, rTouched;
    for (const auto& a : dAtoms) dTouched.push_back(&a.touched);
    for (const auto& a : rAtoms) rTouched.push_back(&a.touched);
    std::vector<std::size_t> dOrder(dAtoms.size()), rOrder(rAtoms.size());
    for (std::size_t i = 0; i < dOrder.size(); ++i) dOrder[i] = i;
    for (std::size_t i = 0; i < rOrder.size(); ++i) rOrder[i] = i;
    if (config.order == SweepOrder::Colored) {
        dOrder = coloredOrder(dTouched, std::vector<int>(dAtoms.size(), 0), shape.size());
        std::vector<int> levels;
        for (const auto& a : rAtoms) levels.push_back(a.level);
        rOrder = coloredOrder(rTouched, levels, shape.size());
    }
    auto batchesFor = [&](const std::vector<const std::vector<std::size_t>*>& touched,
                          const std::vector<std::size_t>& order) {
        if (config.parallelBatches) return buildBatches(touched, order, shape.size());
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i : order) out.push_back({i});
        return out;
    };
    const auto dBatches = batchesFor(dTouched, dOrder);
    const auto rBatches = batchesFor(rTouched, rOrder);
    std::vector<AtomOutcome> dOut(dAtoms.size()), rOut(rAtoms.size());

    auto record = [&](int iteration, double mu) {
        TraceRow row;
        row.iteration = iteration;
        row.mu = mu;
        try {
            row.data = data.total(u);
            row.reg = reg.total(u);
        } catch (const Error& e) {
            throw Error(ErrorCode::NumericalAbort, std::string("objective evaluation failed: ") + e.what());
        }
        row.total = row.data + row.reg;
        if (!std::isfinite(row.total))
            throw Error(ErrorCode::NumericalAbort, "objective is not finite at iteration " + std::to_string(iteration));
        report.trace.push_back(row);
    };
    auto guarded = [](auto&& body) {
        AtomOutcome o;
        try {
            o = body();
        } catch (const Error& e) {
            o.skipped = true;
            o.reason = e.what();
        }
        return o;
    };
    auto merge = [&](const std::vector<AtomOutcome>& outs) {
        for (const auto& o : outs) report.flags.add(o);
    };

    auto dataTrajectory = [&](std::size_t i, double mu) {
        return guarded([&] {
            const auto& atom = dAtoms[i];
            AtomOutcome o;
            const auto res = trajectoryStep<M>(
                m, data.gather(u, atom), [&](const Points& x) { return data.localValue(atom, x); },
                [&](const Points& x) {
                    bool diff = true;
                    auto g = data.localGradient(atom, x, diff);
                    o.nonDifferentiable = o.nonDifferentiable || !diff;
                    return g;
                },
                mu);
            for (std::size_t k = 0; k < atom.sources.size(); ++k) u[atom.sources[k]] = res.points[k];
            o.lineSearchFailed = res.lineSearchFailed;
            return o;
        });
    };
    auto regTrajectory = [&](std::size_t i, double mu) {
        return guarded([&] {
            const auto& atom = rAtoms[i];
            AtomOutcome o;
            const auto res = trajectoryStep<M>(
                m, reg.gather(u, atom), [&](const Points& x) { return reg.localValue(atom, x); },
                [&](const Points& x) {
                    bool diff = true;
                    auto g = reg.localGradient(atom, x, diff);
                    o.nonDifferentiable = o.nonDifferentiable || !diff;
                    return g;
                },
                mu);
            const auto order = reg.localOrder(atom);
            for (std::size_t k = 0; k < order.size(); ++k) u[order[k]] = res.points[k];
            o.lineSearchFailed = res.lineSearchFailed;
            return o;
        });
    };

    record(0, 0.0);
    const bool parallel = config.parallelBatches;
    for (int n = 1; n <= config.iterations; ++n) {
        const double mu = config.cooling.mu(n, config.mu0);
        if (resolved.scheme == Scheme::CPPA) {
            detail::runBatches(dBatches, parallel, dOut, [&](std::size_t i) { return guarded([&] { return data.prox(u, dAtoms[i], mu); }); });
            detail::runBatches(rBatches, parallel, rOut, [&](std::size_t i) { return reg.prox(u, rAtoms[i], mu); });
        } else if (resolved.smooth == SmoothBlock::Data) {
            detail::runBatches(dBatches, parallel, dOut, [&](std::size_t i) { return dataTrajectory(i, mu); });
            detail::runBatches(rBatches, parallel, rOut, [&](std::size_t i) { return reg.prox(u, rAtoms[i], mu); });
        } else {
            detail::runBatches(rBatches, parallel, rOut, [&](std::size_t i) { return regTrajectory(i, mu); });
            detail::runBatches(dBatches, parallel, dOut, [&](std::size_t i) { return guarded([&] { return data.prox(u, dAtoms[i], mu); }); });
        }
        merge(dOut);
        merge(rOut);
        record(n, mu);
    }
    report.result = Grid<M>(m, shape, std::move(u));
    report.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

template <class M>
RunReport<M> runGFB(const Problem<M>& problem, SolverConfig config) {
    config.scheme = Scheme::GFB;
    return runSolver(problem, config);
}

template <class M>
RunReport<M> runCPPA(const Problem<M>& problem, SolverConfig config) {
    config.scheme = Scheme::CPPA;
    return runSolver(problem, config);
}

}  // namespace mvw
