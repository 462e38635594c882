#include "mvw/solver.hpp"

#include <algorithm>

namespace mvw {

double CoolingSchedule::mu(int n, double mu0) const {
    if (n < 1) n = 1;
    if (kind == Kind::PowerLaw) return mu0 * std::pow(static_cast<double>(n), -tau);
    if (n <= 50) return mu0;
    if (n <= 100) return mu0 * std::pow(n / 50.0, -0.35);
    return mu0 * std::pow(2.0, -0.35) * std::pow(n / 100.0, -0.55);
}

std::string CoolingSchedule::describe() const {
    if (kind == Kind::Stagewise) return "stagewise";
    char buf[64];
    std::snprintf(buf, sizeof buf, "power(%.17g)", tau);
    return buf;
}

const char* toString(Scheme s) {
    switch (s) {
        case Scheme::Auto: return "auto";
        case Scheme::GFB: return "gfb";
        case Scheme::CPPA: return "cppa";
    }
    return "?";
}

const char* toString(SmoothBlock s) {
    switch (s) {
        case SmoothBlock::Auto: return "auto";
        case SmoothBlock::Data: return "data";
        case SmoothBlock::Regularizer: return "regularizer";
    }
    return "?";
}

const char* toString(SweepOrder s) { return s == SweepOrder::Colored ? "colored" : "lexicographic"; }

Scheme parseScheme(const std::string& s) {
    if (s == "auto") return Scheme::Auto;
    if (s == "gfb") return Scheme::GFB;
    if (s == "cppa") return Scheme::CPPA;
    throw Error(ErrorCode::Parse, "unknown scheme '" + s + "' (expected auto, gfb or cppa)");
}

SmoothBlock parseSmoothBlock(const std::string& s) {
    if (s == "auto") return SmoothBlock::Auto;
    if (s == "data") return SmoothBlock::Data;
    if (s == "regularizer") return SmoothBlock::Regularizer;
    throw Error(ErrorCode::Parse, "unknown smooth block '" + s + "' (expected auto, data or regularizer)");
}

SweepOrder parseSweepOrder(const std::string& s) {
    if (s == "lexicographic") return SweepOrder::Lexicographic;
    if (s == "colored") return SweepOrder::Colored;
    throw Error(ErrorCode::Parse, "unknown sweep order '" + s + "' (expected lexicographic or colored)");
}

void RunFlags::add(const AtomOutcome& o) {
    skippedAtoms += o.skipped;
    stalledProxes += o.stalled;
    lineSearchFailures += o.lineSearchFailed;
    nonDifferentiable += o.nonDifferentiable;
    if (o.skipped && messages.size() < 10) messages.push_back(o.reason);
}

ResolvedScheme resolveScheme(const SolverConfig& config, double p, double q, bool dataHasProx) {
    Scheme scheme = config.scheme;
    if (scheme == Scheme::Auto) scheme = (p == 1.0 && (q == 0.0 || q == 1.0)) ? Scheme::CPPA : Scheme::GFB;
    if (scheme == Scheme::CPPA) {
        if (!dataHasProx) throw Error(ErrorCode::InvalidArgument, "CPPA needs the identity or inpainting operator");
        return {Scheme::CPPA, SmoothBlock::Auto};
    }
    SmoothBlock smooth = config.smooth;
    if (smooth == SmoothBlock::Auto) {
        if (p > 1.0)
            smooth = SmoothBlock::Data;
        else if (q > 1.0)
            smooth = SmoothBlock::Regularizer;
        else
            throw Error(ErrorCode::InvalidArgument, "GFB needs p > 1 or q > 1");
    }
    if (smooth == SmoothBlock::Data && !(p > 1.0))
        throw Error(ErrorCode::InvalidArgument, "a smooth data block needs p > 1");
    if (smooth == SmoothBlock::Regularizer) {
        if (!(q > 1.0)) throw Error(ErrorCode::InvalidArgument, "a smooth regularizer block needs q > 1");
        if (!dataHasProx) throw Error(ErrorCode::InvalidArgument, "the data prox needs the identity or inpainting operator");
    }
    return {Scheme::GFB, smooth};
}

std::vector<std::vector<std::size_t>> buildBatches(const std::vector<const std::vector<std::size_t>*>& touched,
                                                   const std::vector<std::size_t>& order, std::size_t siteCount) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<char> used(siteCount, 0);
    std::vector<std::size_t> current;
    auto flush = [&] {
        for (std::size_t a : current)
            for (std::size_t s : *touched[a]) used[s] = 0;
        out.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t a : order) {
        const auto& sites = *touched[a];
        const bool clash = std::any_of(sites.begin(), sites.end(), [&](std::size_t s) { return used[s] != 0; });
        if (clash) flush();
        for (std::size_t s : sites) used[s] = 1;
        current.push_back(a);
    }
    if (!current.empty()) flush();
    return out;
}

std::vector<std::size_t> coloredOrder(const std::vector<const std::vector<std::size_t>*>& touched,
                                      const std::vector<int>& groups, std::size_t siteCount) {
    const std::size_t n = touched.size();
    std::vector<std::vector<std::size_t>> bySite(siteCount);
    std::vector<int> color(n, -1);
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<char> taken;
        for (std::size_t s : *touched[a])
            for (std::size_t b : bySite[s])
                if (groups[b] == groups[a]) {
                    if (taken.size() <= static_cast<std::size_t>(color[b])) taken.resize(color[b] + 1, 0);
                    taken[color[b]] = 1;
                }
        int c = 0;
        while (c < static_cast<int>(taken.size()) && taken[c]) ++c;
        color[a] = c;
        for (std::size_t s : *touched[a]) bySite[s].push_back(a);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a] != groups[b]) return groups[a] < groups[b];
        return color[a] < color[b];
    });
    return order;
}

}  // namespace mvw
