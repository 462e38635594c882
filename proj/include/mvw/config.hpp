#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvw/dataterm.hpp"
#include "mvw/mask.hpp"
#include "mvw/regularizer.hpp"
#include "mvw/solver.hpp"
#include "mvw/synth.hpp"

namespace mvw {

const std::vector<std::string>& commandNames();

struct InputSpec {
    /// Grid CSV (or pyramid JSON for `reconstruct`); empty means a generated phantom.
    std::string path;
    /// Optional ground truth grid for loaded inputs.
    std::string truth;
    PhantomKind phantom = PhantomKind::SmoothJumps;
    std::vector<int> dims{256};
};

struct NoiseConfig {
    bool enabled = false;
    std::optional<NoiseSpec::Kind> kind;  // defaults to the manifold's model
    double parameter = 0.0;
};

struct OperatorConfig {
    enum class Kind { Identity, Gaussian, Kernel };
    Kind kind = Kind::Identity;
    double sigma = 2.0;
    int window = 13;
    std::vector<double> taps;
    BoundaryRule boundary = BoundaryRule::reflect();

    ImagingOperator build() const;
};

struct MetricsConfig {
    std::string truth;
    std::string observations;
    std::string result;
};

struct JobConfig {
    std::string command;
    std::string manifold = "S1";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out = "out";

    InputSpec input;
    NoiseConfig noise;
    MaskKind mask = MaskKind::DD3;
    int levels = 3;
    BoundaryRule boundary = BoundaryRule::reflect();
    RegParams reg;
    double p = 2.0;
    OperatorConfig op;
    SolverConfig solver;
    MetricsConfig metrics;
};

/// Defaults for a command before any file is read.
JobConfig defaultConfig(const std::string& command);

/// Reads TOML-like text with sections [job], [input], [noise], [transform],
/// [regularizer], [data], [solver] and [metrics]. Unknown keys are errors.
JobConfig parseConfig(const std::string& text, const std::string& name, const std::string& command);
JobConfig loadConfig(const std::filesystem::path& path, const std::string& command);

/// Complete, resolved configuration that parses back to the same job.
std::string echoConfig(const JobConfig& c);

}  // namespace mvw
