#include "mvw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mvw {

std::string formatDouble(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string gridHeaderLine(const std::string& tag, const Shape& shape) {
    std::string s = "# manifold=" + tag + " dims=";
    for (int a = 0; a < shape.rank(); ++a) s += (a ? "," : "") + std::to_string(shape.dim(a));
    return s;
}

GridHeader parseGridHeader(const std::string& line, const std::string& where) {
    auto fail = [&](const std::string& why) { return Error(ErrorCode::Parse, where + ": bad grid header: " + why); };
    std::istringstream in(line);
    std::string hash;
    in >> hash;
    if (hash != "#") throw fail("expected '# manifold=<tag> dims=<d1,...>'");
    GridHeader h;
    bool haveDims = false;
    std::string field;
    while (in >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw fail("field '" + field + "' is not key=value");
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "manifold") {
            h.manifold = value;
        } else if (key == "dims") {
            std::istringstream ds(value);
            std::string part;
            while (std::getline(ds, part, ',')) {
                int d = 0;
                const auto res = std::from_chars(part.data(), part.data() + part.size(), d);
                if (res.ec != std::errc() || res.ptr != part.data() + part.size() || d <= 0)
                    throw fail("dimension '" + part + "' is not a positive integer");
                h.dims.push_back(d);
            }
            haveDims = true;
        } else {
            throw fail("unknown field '" + key + "'");
        }
    }
    if (h.manifold.empty()) throw fail("missing manifold");
    if (!haveDims || h.dims.empty()) throw fail("missing dims");
    return h;
}

GridTable readGridTable(std::istream& in, const std::string& name) {
    GridTable t;
    std::string line;
    int lineNo = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = name + ":" + std::to_string(lineNo);
        if (!header) {
            t.header = parseGridHeader(line, where);
            header = true;
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        int column = 0;
        while (pos <= line.size()) {
            std::size_t end = line.find(',', pos);
            if (end == std::string::npos) end = line.size();
            std::size_t a = pos, b = end;
            while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
            while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
            ++column;
            double v = 0.0;
            const auto res = std::from_chars(line.data() + a, line.data() + b, v);
            if (a == b || res.ec != std::errc() || res.ptr != line.data() + b)
                throw Error(ErrorCode::Parse, where + ": column " + std::to_string(column) + " is not a number: '" +
                                                  line.substr(a, b - a) + "'");
            row.push_back(v);
            pos = end + 1;
        }
        t.rows.push_back(std::move(row));
        t.lines.push_back(lineNo);
    }
    if (!header) throw Error(ErrorCode::Parse, name + ": empty grid file");
    return t;
}

GridTable readGridTable(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return readGridTable(in, path.string());
}

std::vector<double> tangentRow(const Circle&, double v) { return {v}; }
std::vector<double> tangentRow(const Sphere&, const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
std::vector<double> tangentRow(const Spd3&, const Eigen::Matrix3d& v) {
    return {v(0, 0), v(0, 1), v(0, 2), v(1, 1), v(1, 2), v(2, 2)};
}
std::vector<double> tangentRow(const EuclideanN&, const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

namespace {

void checkWidth(std::span<const double> row, std::size_t n) {
    if (row.size() != n) throw Error(ErrorCode::Parse, "tangent row needs " + std::to_string(n) + " entries");
}

}  // namespace

double tangentFromRow(const Circle&, std::span<const double> row) {
    checkWidth(row, 1);
    return row[0];
}

Eigen::Vector3d tangentFromRow(const Sphere&, std::span<const double> row) {
    checkWidth(row, 3);
    return {row[0], row[1], row[2]};
}

Eigen::Matrix3d tangentFromRow(const Spd3&, std::span<const double> row) {
    checkWidth(row, 6);
    return Spd3::fromUpper(row);
}

Eigen::VectorXd tangentFromRow(const EuclideanN& m, std::span<const double> row) {
    checkWidth(row, static_cast<std::size_t>(m.dim()));
    return Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

template <class M>
void writeGridFile(const std::filesystem::path& path, const Grid<M>& g) {
    std::ostringstream s;
    writeGrid(s, g);
    writeTextFile(path, s.str());
}

template void writeGridFile(const std::filesystem::path&, const Grid<Circle>&);
template void writeGridFile(const std::filesystem::path&, const Grid<Sphere>&);
template void writeGridFile(const std::filesystem::path&, const Grid<Spd3>&);
template void writeGridFile(const std::filesystem::path&, const Grid<EuclideanN>&);

std::string traceCsv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,mu,data,regularizer,total\n";
    for (const auto& r : trace)
        out += std::to_string(r.iteration) + "," + formatDouble(r.mu) + "," + formatDouble(r.data) + "," +
               formatDouble(r.reg) + "," + formatDouble(r.total) + "\n";
    return out;
}

}  // namespace mvw
