#include "mvw/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "mvw/io.hpp"

namespace mvw {

const std::vector<std::string>& commandNames() {
    static const std::vector<std::string> names{"transform", "reconstruct", "denoise", "deconvolve", "noise", "metrics"};
    return names;
}

ImagingOperator OperatorConfig::build() const {
    switch (kind) {
        case Kind::Identity: return ImagingOperator::identity();
        case Kind::Gaussian: return ImagingOperator::gaussian(sigma, window, boundary);
        case Kind::Kernel: return ImagingOperator::meanKernel(taps, boundary);
    }
    return ImagingOperator::identity();
}

JobConfig defaultConfig(const std::string& command) {
    JobConfig c;
    c.command = command;
    if (command == "deconvolve") {
        c.reg.lambda1 = 6.0;
        c.reg.lambda2 = 1e-4;
        c.op.kind = OperatorConfig::Kind::Gaussian;
    } else {
        c.reg.lambda1 = 4.0;
        c.reg.lambda2 = 0.0;
    }
    return c;
}

namespace {

class Reader {
public:
    Reader(const toml::table& root, std::string name) : root_(root), name_(std::move(name)) {
        static const std::map<std::string, std::set<std::string>> allowed{
            {"job", {"command", "manifold", "seed", "threads", "out"}},
            {"input", {"path", "truth", "phantom", "dims"}},
            {"noise", {"kind", "parameter"}},
            {"transform", {"mask", "levels", "boundary"}},
            {"regularizer", {"lambda1", "lambda2", "alpha", "q"}},
            {"data", {"p", "operator", "sigma", "window", "taps", "boundary"}},
            {"solver", {"scheme", "iterations", "mu0", "cooling", "tau", "order", "parallel_batches", "smooth"}},
            {"metrics", {"truth", "observations", "result"}},
        };
        for (const auto& [key, node] : root) {
            const std::string section(key.str());
            const auto it = allowed.find(section);
            if (it == allowed.end() || !node.is_table()) throw fail(node, "unknown section [" + section + "]");
            for (const auto& [k, v] : *node.as_table())
                if (!it->second.count(std::string(k.str())))
                    throw fail(v, "unknown key '" + std::string(k.str()) + "' in [" + section + "]");
        }
    }

    const toml::node* find(const char* section, const char* key) const {
        const auto* t = root_.get_as<toml::table>(section);
        return t ? t->get(key) : nullptr;
    }

    void number(const char* section, const char* key, double& out) const {
        if (const auto* n = find(section, key)) {
            if (auto v = n->value<double>())
                out = *v;
            else
                throw fail(*n, qualified(section, key) + " must be a number");
        }
    }

    template <class Int>
    void integer(const char* section, const char* key, Int& out) const {
        if (const auto* n = find(section, key)) {
            const auto* v = n->as_integer();
            if (!v) throw fail(*n, qualified(section, key) + " must be an integer");
            if (v->get() < 0 && std::is_unsigned_v<Int>) throw fail(*n, qualified(section, key) + " must be nonnegative");
            out = static_cast<Int>(v->get());
        }
    }

    void boolean(const char* section, const char* key, bool& out) const {
        if (const auto* n = find(section, key)) {
            const auto* v = n->as_boolean();
            if (!v) throw fail(*n, qualified(section, key) + " must be true or false");
            out = v->get();
        }
    }

    bool string(const char* section, const char* key, std::string& out) const {
        if (const auto* n = find(section, key)) {
            const auto* v = n->as_string();
            if (!v) throw fail(*n, qualified(section, key) + " must be a string");
            out = v->get();
            return true;
        }
        return false;
    }

    template <class T, class Parse>
    void choice(const char* section, const char* key, T& out, Parse&& parse) const {
        std::string s;
        if (!string(section, key, s)) return;
        try {
            out = parse(s);
        } catch (const Error& e) {
            throw fail(*find(section, key), qualified(section, key) + ": " + e.what());
        }
    }

    template <class T>
    void list(const char* section, const char* key, std::vector<T>& out) const {
        const auto* n = find(section, key);
        if (!n) return;
        const auto* arr = n->as_array();
        if (!arr) throw fail(*n, qualified(section, key) + " must be an array");
        out.clear();
        for (const auto& e : *arr) {
            if constexpr (std::is_same_v<T, int>) {
                const auto* v = e.as_integer();
                if (!v) throw fail(e, qualified(section, key) + " entries must be integers");
                out.push_back(static_cast<int>(v->get()));
            } else {
                const auto v = e.value<double>();
                if (!v) throw fail(e, qualified(section, key) + " entries must be numbers");
                out.push_back(*v);
            }
        }
    }

    Error fail(const toml::node& n, const std::string& why) const {
        return Error(ErrorCode::Parse, name_ + ":" + std::to_string(n.source().begin.line) + ": " + why);
    }

private:
    static std::string qualified(const char* s, const char* k) { return std::string(s) + "." + k; }

    const toml::table& root_;
    std::string name_;
};

OperatorConfig::Kind parseOperatorKind(const std::string& s) {
    if (s == "identity") return OperatorConfig::Kind::Identity;
    if (s == "gaussian") return OperatorConfig::Kind::Gaussian;
    if (s == "kernel") return OperatorConfig::Kind::Kernel;
    throw Error(ErrorCode::Parse, "unknown operator '" + s + "' (expected identity, gaussian or kernel)");
}

const char* toString(OperatorConfig::Kind k) {
    switch (k) {
        case OperatorConfig::Kind::Identity: return "identity";
        case OperatorConfig::Kind::Gaussian: return "gaussian";
        case OperatorConfig::Kind::Kernel: return "kernel";
    }
    return "?";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

template <class T, class F>
std::string array(const std::vector<T>& v, F&& fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out + "]";
}

/// TOML floats need a fractional part or exponent so they read back as floats.
std::string tomlFloat(double v) {
    std::string s = formatDouble(v);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

JobConfig parseConfig(const std::string& text, const std::string& name, const std::string& command) {
    toml::table root;
    try {
        root = toml::parse(text, name);
    } catch (const toml::parse_error& e) {
        throw Error(ErrorCode::Parse, name + ":" + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
    }
    const Reader r(root, name);
    std::string fileCommand;
    if (r.string("job", "command", fileCommand) && fileCommand != command)
        throw r.fail(*r.find("job", "command"), "config is for command '" + fileCommand + "', not '" + command + "'");
    JobConfig c = defaultConfig(command);
    r.string("job", "manifold", c.manifold);
    r.integer("job", "seed", c.seed);
    r.integer("job", "threads", c.threads);
    r.string("job", "out", c.out);

    r.string("input", "path", c.input.path);
    r.string("input", "truth", c.input.truth);
    r.choice("input", "phantom", c.input.phantom, parsePhantomKind);
    r.list("input", "dims", c.input.dims);

    if (r.find("noise", "kind") || r.find("noise", "parameter")) {
        c.noise.enabled = true;
        NoiseSpec::Kind k{};
        if (r.find("noise", "kind")) {
            r.choice("noise", "kind", k, parseNoiseKind);
            c.noise.kind = k;
        }
        if (!r.find("noise", "parameter"))
            throw r.fail(*r.find("noise", "kind"), "noise.parameter is required when [noise] is given");
        r.number("noise", "parameter", c.noise.parameter);
    }

    r.choice("transform", "mask", c.mask, parseMaskKind);
    r.integer("transform", "levels", c.levels);
    r.choice("transform", "boundary", c.boundary, BoundaryRule::parse);

    r.number("regularizer", "lambda1", c.reg.lambda1);
    r.number("regularizer", "lambda2", c.reg.lambda2);
    r.number("regularizer", "alpha", c.reg.alpha);
    r.number("regularizer", "q", c.reg.q);

    r.number("data", "p", c.p);
    r.choice("data", "operator", c.op.kind, parseOperatorKind);
    r.number("data", "sigma", c.op.sigma);
    r.integer("data", "window", c.op.window);
    r.list("data", "taps", c.op.taps);
    r.choice("data", "boundary", c.op.boundary, BoundaryRule::parse);

    r.choice("solver", "scheme", c.solver.scheme, parseScheme);
    r.integer("solver", "iterations", c.solver.iterations);
    r.number("solver", "mu0", c.solver.mu0);
    std::string cooling;
    if (r.string("solver", "cooling", cooling)) {
        if (cooling == "power")
            c.solver.cooling.kind = CoolingSchedule::Kind::PowerLaw;
        else if (cooling == "stagewise")
            c.solver.cooling.kind = CoolingSchedule::Kind::Stagewise;
        else
            throw r.fail(*r.find("solver", "cooling"), "solver.cooling must be \"power\" or \"stagewise\"");
    }
    r.number("solver", "tau", c.solver.cooling.tau);
    r.choice("solver", "order", c.solver.order, parseSweepOrder);
    r.boolean("solver", "parallel_batches", c.solver.parallelBatches);
    r.choice("solver", "smooth", c.solver.smooth, parseSmoothBlock);

    r.string("metrics", "truth", c.metrics.truth);
    r.string("metrics", "observations", c.metrics.observations);
    r.string("metrics", "result", c.metrics.result);
    return c;
}

JobConfig loadConfig(const std::filesystem::path& path, const std::string& command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return parseConfig(s.str(), path.string(), command);
}

std::string echoConfig(const JobConfig& c) {
    std::ostringstream o;
    auto ints = [](int v) { return std::to_string(v); };
    o << "[job]\n"
      << "command = " << quoted(c.command) << "\n"
      << "manifold = " << quoted(c.manifold) << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n"
      << "out = " << quoted(c.out) << "\n\n";
    o << "[input]\n";
    if (!c.input.path.empty()) o << "path = " << quoted(c.input.path) << "\n";
    if (!c.input.truth.empty()) o << "truth = " << quoted(c.input.truth) << "\n";
    o << "phantom = " << quoted(toString(c.input.phantom)) << "\n"
      << "dims = " << array(c.input.dims, ints) << "\n\n";
    if (c.noise.enabled) {
        o << "[noise]\n";
        if (c.noise.kind) o << "kind = " << quoted(toString(*c.noise.kind)) << "\n";
        o << "parameter = " << tomlFloat(c.noise.parameter) << "\n\n";
    }
    o << "[transform]\n"
      << "mask = " << quoted(toString(c.mask)) << "\n"
      << "levels = " << c.levels << "\n"
      << "boundary = " << quoted(c.boundary.toString()) << "\n\n";
    o << "[regularizer]\n"
      << "lambda1 = " << tomlFloat(c.reg.lambda1) << "\n"
      << "lambda2 = " << tomlFloat(c.reg.lambda2) << "\n"
      << "alpha = " << tomlFloat(c.reg.alpha) << "\n"
      << "q = " << tomlFloat(c.reg.q) << "\n\n";
    o << "[data]\n"
      << "p = " << tomlFloat(c.p) << "\n"
      << "operator = " << quoted(toString(c.op.kind)) << "\n"
      << "sigma = " << tomlFloat(c.op.sigma) << "\n"
      << "window = " << c.op.window << "\n";
    if (!c.op.taps.empty()) o << "taps = " << array(c.op.taps, tomlFloat) << "\n";
    o << "boundary = " << quoted(c.op.boundary.toString()) << "\n\n";
    o << "[solver]\n"
      << "scheme = " << quoted(toString(c.solver.scheme)) << "\n"
      << "iterations = " << c.solver.iterations << "\n"
      << "mu0 = " << tomlFloat(c.solver.mu0) << "\n"
      << "cooling = " << quoted(c.solver.cooling.kind == CoolingSchedule::Kind::Stagewise ? "stagewise" : "power") << "\n"
      << "tau = " << tomlFloat(c.solver.cooling.tau) << "\n"
      << "order = " << quoted(toString(c.solver.order)) << "\n"
      << "parallel_batches = " << (c.solver.parallelBatches ? "true" : "false") << "\n"
      << "smooth = " << quoted(toString(c.solver.smooth)) << "\n";
    if (!c.metrics.truth.empty() || !c.metrics.observations.empty() || !c.metrics.result.empty()) {
        o << "\n[metrics]\n";
        if (!c.metrics.truth.empty()) o << "truth = " << quoted(c.metrics.truth) << "\n";
        if (!c.metrics.observations.empty()) o << "observations = " << quoted(c.metrics.observations) << "\n";
        if (!c.metrics.result.empty()) o << "result = " << quoted(c.metrics.result) << "\n";
    }
    return o.str();
}

}  // namespace mvw
