#include "mvw/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>

#include "mvw/config.hpp"
#include "mvw/io.hpp"

namespace mvw {

namespace {

namespace fs = std::filesystem;

template <class M>
struct JobData {
    std::optional<Grid<M>> truth;
    Grid<M> observations;
};

template <class M>
NoiseSpec noiseSpec(const JobConfig& c) {
    NoiseSpec spec;
    if constexpr (std::is_same_v<M, Circle>)
        spec.kind = NoiseSpec::Kind::VonMises;
    else if constexpr (std::is_same_v<M, Sphere>)
        spec.kind = NoiseSpec::Kind::TangentGaussian;
    else
        spec.kind = NoiseSpec::Kind::Rician;
    if (c.noise.kind) spec.kind = *c.noise.kind;
    spec.parameter = c.noise.parameter;
    spec.seed = c.seed;
    return spec;
}

/// Loads the observations or generates them from a phantom, optionally
/// blurred by `blur` before the noise is added.
template <class M>
JobData<M> obtain(const JobConfig& c, const M& m, const ImagingOperator* blur) {
    if (!c.input.path.empty()) {
        JobData<M> d{std::nullopt, readGrid(m, c.input.path)};
        if (!c.input.truth.empty()) d.truth = readGrid(m, c.input.truth);
        return d;
    }
    Grid<M> g = makePhantom(c.input.phantom, Shape(c.input.dims), m);
    Grid<M> x = blur ? applyOperator(*blur, g) : g;
    if (c.noise.enabled) x = applyNoise(x, noiseSpec<M>(c));
    return {std::move(g), std::move(x)};
}

void writeEcho(const JobConfig& c) { writeTextFile(fs::path(c.out) / "config.toml", echoConfig(c)); }

template <class M>
int cmdTransform(const JobConfig& c, const M& m, std::ostream& out) {
    const auto data = obtain(c, m, nullptr);
    const fs::path dir(c.out);
    const auto pyr = forwardTransform(data.observations, c.levels, makeMask(c.mask, data.observations.shape.rank()), c.boundary);
    writeGridFile(dir / "input.csv", data.observations);
    writeTextFile(dir / "pyramid.json", pyramidToJson(pyr).dump(1) + "\n");
    for (int r = 1; r <= pyr.levelCount; ++r)
        writeTextFile(dir / ("details_level" + std::to_string(r) + ".csv"), levelMagnitudeCsv(pyr, r));
    writeEcho(c);
    out << "transform: " << pyr.levelCount << " levels, coarse grid " << pyr.coarse.shape.toString() << " -> " << dir.string()
        << "\n";
    return kExitOk;
}

template <class M>
int cmdReconstruct(const JobConfig& c, const M& m, std::ostream& out) {
    if (c.input.path.empty()) throw Error(ErrorCode::InvalidArgument, "reconstruct needs input.path pointing to a pyramid JSON file");
    std::ifstream in(c.input.path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + c.input.path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, c.input.path + ": " + e.what());
    }
    const auto pyr = pyramidFromJson(m, j);
    const auto u = inverseTransform(pyr, makeMask(pyr.mask, pyr.coarse.shape.rank()), pyr.boundary);
    writeGridFile(fs::path(c.out) / "reconstruction.csv", u);
    writeEcho(c);
    out << "reconstruct: grid " << u.shape.toString() << " -> " << c.out << "\n";
    return kExitOk;
}

template <class M>
int cmdNoise(const JobConfig& c, const M& m, std::ostream& out) {
    if (!c.noise.enabled) throw Error(ErrorCode::InvalidArgument, "noise needs a [noise] section with a parameter");
    JobData<M> data;
    if (!c.input.path.empty()) {
        data.truth = readGrid(m, c.input.path);
        data.observations = applyNoise(*data.truth, noiseSpec<M>(c));
    } else {
        data = obtain(c, m, nullptr);
    }
    writeGridFile(fs::path(c.out) / "truth.csv", *data.truth);
    writeGridFile(fs::path(c.out) / "noisy.csv", data.observations);
    writeEcho(c);
    out << "noise: " << noiseSpec<M>(c).describe() << " -> " << c.out << "\n";
    return kExitOk;
}

nlohmann::json snrJson(const SnrResult& s) {
    nlohmann::json j;
    j["infinite"] = s.infinite;
    if (s.infinite)
        j["db"] = nullptr;
    else
        j["db"] = s.db;
    return j;
}

template <class M>
int cmdSolve(const JobConfig& c, const M& m, std::ostream& out) {
    const bool deconvolve = c.command == "deconvolve";
    if (!deconvolve && c.op.kind != OperatorConfig::Kind::Identity)
        throw Error(ErrorCode::InvalidArgument, "denoise uses the identity operator; use deconvolve for a blur");
    if (deconvolve && c.op.kind == OperatorConfig::Kind::Identity)
        throw Error(ErrorCode::InvalidArgument, "deconvolve needs a gaussian or kernel operator");
    const ImagingOperator op = c.op.build();
    const auto data = obtain(c, m, deconvolve ? &op : nullptr);

    Problem<M> problem;
    problem.observations = data.observations;
    problem.op = op;
    problem.p = c.p;
    problem.levels = c.levels;
    problem.mask = c.mask;
    problem.boundary = c.boundary;
    problem.reg = c.reg;
    const auto report = runSolver(problem, c.solver);

    const fs::path dir(c.out);
    writeGridFile(dir / "observations.csv", data.observations);
    if (data.truth) writeGridFile(dir / "truth.csv", *data.truth);
    writeGridFile(dir / "result.csv", report.result);
    writeTextFile(dir / "trace.csv", traceCsv(report.trace));
    writeEcho(c);

    nlohmann::json j;
    j["command"] = c.command;
    j["manifold"] = m.tag();
    j["scheme"] = toString(report.scheme);
    j["smooth_block"] = toString(report.smooth);
    j["iterations"] = c.solver.iterations;
    j["initial_objective"] = report.trace.front().total;
    j["final_objective"] = report.trace.back().total;
    j["flags"] = {{"skipped_atoms", report.flags.skippedAtoms},
                  {"stalled_proxes", report.flags.stalledProxes},
                  {"line_search_failures", report.flags.lineSearchFailures},
                  {"non_differentiable", report.flags.nonDifferentiable},
                  {"messages", report.flags.messages}};
    j["wall_seconds"] = report.wallSeconds;
    out << c.command << ": " << toString(report.scheme) << ", objective " << report.trace.front().total << " -> "
        << report.trace.back().total;
    if (data.truth) {
        const auto snr = deltaSNR(*data.truth, data.observations, report.result);
        j["delta_snr"] = snrJson(snr);
        if (snr.infinite)
            out << ", delta SNR infinite";
        else
            out << ", delta SNR " << snr.db << " dB";
    }
    out << "\n";
    writeTextFile(dir / "report.json", j.dump(2) + "\n");
    return kExitOk;
}

template <class M>
int cmdMetrics(const JobConfig& c, const M& m, std::ostream& out) {
    const auto& mc = c.metrics;
    if (mc.truth.empty() || mc.observations.empty() || mc.result.empty())
        throw Error(ErrorCode::InvalidArgument, "metrics needs [metrics] truth, observations and result paths");
    const auto g = readGrid(m, mc.truth), f = readGrid(m, mc.observations), u = readGrid(m, mc.result);
    const auto snr = deltaSNR(g, f, u);
    auto rms = [&](const Grid<M>& a) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.points.size(); ++i) s += std::pow(m.dist(g.points[i], a.points[i]), 2);
        return std::sqrt(s / g.points.size());
    };
    nlohmann::json j;
    j["delta_snr"] = snrJson(snr);
    j["rms_distance_observations"] = rms(f);
    j["rms_distance_result"] = rms(u);
    writeTextFile(fs::path(c.out) / "metrics.json", j.dump(2) + "\n");
    if (snr.infinite)
        out << "delta SNR: infinite\n";
    else
        out << "delta SNR: " << snr.db << " dB\n";
    return kExitOk;
}

template <class M>
int dispatch(const JobConfig& c, const M& m, std::ostream& out) {
    if (c.command == "transform") return cmdTransform(c, m, out);
    if (c.command == "reconstruct") return cmdReconstruct(c, m, out);
    if (c.command == "noise") return cmdNoise(c, m, out);
    if (c.command == "metrics") return cmdMetrics(c, m, out);
    return cmdSolve(c, m, out);
}

int runJob(const JobConfig& c, std::ostream& out) {
    if (c.manifold == "S1") return dispatch(c, Circle{}, out);
    if (c.manifold == "S2") return dispatch(c, Sphere{}, out);
    if (c.manifold == "SPD3") return dispatch(c, Spd3{}, out);
    if (c.manifold.size() > 1 && c.manifold[0] == 'R') {
        int n = 0;
        const auto res = std::from_chars(c.manifold.data() + 1, c.manifold.data() + c.manifold.size(), n);
        if (res.ec == std::errc() && res.ptr == c.manifold.data() + c.manifold.size() && n > 0)
            return dispatch(c, EuclideanN(n), out);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown manifold '" + c.manifold + "' (expected S1, S2, SPD3 or R<n>)");
}

bool isConfigError(ErrorCode code) {
    return code == ErrorCode::Parse || code == ErrorCode::InvalidArgument || code == ErrorCode::Io ||
           code == ErrorCode::ManifoldMismatch;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse wavelet regularization of manifold-valued signals and images", "mvw"};
    std::string command, configPath;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> outDir;
    std::optional<int> threads;
    app.add_option("command", command, "transform | reconstruct | denoise | deconvolve | noise | metrics")
        ->required()
        ->check(CLI::IsMember(commandNames()));
    app.add_option("--config", configPath, "job configuration file");
    app.add_option("--seed", seed, "noise seed (overrides job.seed)");
    app.add_option("--out", outDir, "output directory (overrides job.out)");
    app.add_option("--threads", threads, "OpenMP threads for parallel batches (overrides job.threads)");
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    try {
        JobConfig c = configPath.empty() ? defaultConfig(command) : loadConfig(configPath, command);
        if (seed) c.seed = *seed;
        if (outDir) c.out = *outDir;
        if (threads) c.threads = *threads;
        if (c.threads < 0) throw Error(ErrorCode::InvalidArgument, "thread count must be nonnegative");
        if (c.threads > 0) omp_set_num_threads(c.threads);
        return runJob(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return isConfigError(e.code()) ? kExitConfig : kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace mvw
