#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "mvw/error.hpp"

namespace mvw {

struct DescentOptions {
    int maxIterations = 100;
    int maxHalvings = 40;
    /// Stop when the gradient norm falls below this value.
    double gradientTolerance = 1e-12;
    /// Stop when an accepted step lowers the objective by less than this (relative).
    double stallTolerance = 1e-15;
};

template <class M>
struct DescentResult {
    std::vector<typename M::Point> points;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Riemannian gradient descent on a product of copies of M with
/// Barzilai-Borwein step lengths safeguarded by Armijo backtracking.
/// Geometry errors raised while evaluating a trial point count as an
/// infinite objective. Returns the best iterate found.
template <class M>
DescentResult<M> localDescent(const M& m, std::vector<typename M::Point> x,
                              const std::function<double(const std::vector<typename M::Point>&)>& value,
                              const std::function<std::vector<typename M::Vec>(const std::vector<typename M::Point>&)>& gradient,
                              double initialStep, const DescentOptions& options = {},
                              const std::function<bool(const std::vector<typename M::Point>&)>& stop = {}) {
    using Point = typename M::Point;
    using Vec = typename M::Vec;
    const std::size_t n = x.size();
    auto safeValue = [&](const std::vector<Point>& p) {
        try {
            const double v = value(p);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto normSq = [&](const std::vector<Point>& p, const std::vector<Vec>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += m.inner(p[i], g[i], g[i]);
        return s;
    };

    DescentResult<M> out;
    double fx = safeValue(x);
    out.points = x;
    out.value = fx;
    if (!std::isfinite(fx)) return out;
    std::vector<Vec> g = gradient(x);
    double gg = normSq(x, g);
    double step = initialStep;
    const double minStep = initialStep * 1e-8, maxStep = initialStep * 1e8;

    for (int it = 0; it < options.maxIterations; ++it) {
        out.iterations = it;
        if (std::sqrt(gg) <= options.gradientTolerance) {
            out.converged = true;
            break;
        }
        if (stop && stop(x)) break;
        std::vector<Point> trial(n);
        double ft = 0.0;
        bool accepted = false;
        double t = step;
        for (int h = 0; h <= options.maxHalvings; ++h, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = m.exp(x[i], -t * g[i]);
            ft = safeValue(trial);
            if (ft <= fx - 1e-4 * t * gg) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.converged = std::sqrt(gg) * initialStep <= 1e-10 * (1.0 + std::abs(fx));
            break;
        }
        std::vector<Vec> gn;
        try {
            gn = gradient(trial);
        } catch (const Error&) {
            x = trial;
            fx = ft;
            break;
        }
        // Barzilai-Borwein step from the transported previous gradient.
        double sy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec s = -t * m.transport(x[i], trial[i], g[i]);
            const Vec y = gn[i] - m.transport(x[i], trial[i], g[i]);
            sy += m.inner(trial[i], s, y);
            ss += m.inner(trial[i], s, s);
        }
        step = sy > 0.0 ? std::clamp(ss / sy, minStep, maxStep) : std::min(2.0 * t, maxStep);
        const double decrease = fx - ft;
        x = std::move(trial);
        fx = ft;
        g = std::move(gn);
        gg = normSq(x, g);
        if (fx < out.value) {
            out.value = fx;
            out.points = x;
        }
        if (decrease <= options.stallTolerance * (1.0 + std::abs(fx))) {
            out.converged = true;
            break;
        }
    }
    if (fx < out.value) {
        out.value = fx;
        out.points = x;
    }
    return out;
}

}  // namespace mvw
