#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvw/circle.hpp"
#include "mvw/euclidean.hpp"
#include "mvw/grid.hpp"
#include "mvw/multiscale.hpp"
#include "mvw/solver.hpp"
#include "mvw/spd3.hpp"
#include "mvw/sphere.hpp"

namespace mvw {

/// Shortest text that parses back to the same double.
std::string formatDouble(double v);

/// Header of a grid file: `# manifold=<tag> dims=<d1,d2,...>`.
struct GridHeader {
    std::string manifold;
    std::vector<int> dims;
};

GridHeader parseGridHeader(const std::string& line, const std::string& where);
std::string gridHeaderLine(const std::string& tag, const Shape& shape);

/// Numeric rows of a grid file; errors name the file and line.
struct GridTable {
    GridHeader header;
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;  // source line of each row
};
GridTable readGridTable(std::istream& in, const std::string& name);
GridTable readGridTable(const std::filesystem::path& path);

std::vector<double> tangentRow(const Circle&, double v);
std::vector<double> tangentRow(const Sphere&, const Eigen::Vector3d& v);
std::vector<double> tangentRow(const Spd3&, const Eigen::Matrix3d& v);
std::vector<double> tangentRow(const EuclideanN&, const Eigen::VectorXd& v);
double tangentFromRow(const Circle&, std::span<const double> row);
Eigen::Vector3d tangentFromRow(const Sphere&, std::span<const double> row);
Eigen::Matrix3d tangentFromRow(const Spd3&, std::span<const double> row);
Eigen::VectorXd tangentFromRow(const EuclideanN& m, std::span<const double> row);

template <class M>
void writeGrid(std::ostream& out, const Grid<M>& g) {
    out << gridHeaderLine(g.manifold.tag(), g.shape) << '\n';
    for (const auto& p : g.points) {
        const auto row = g.manifold.toRow(p);
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << formatDouble(row[k]);
        out << '\n';
    }
}

template <class M>
Grid<M> gridFromTable(const M& m, const GridTable& t, const std::string& name) {
    if (t.header.manifold != m.tag())
        throw Error(ErrorCode::ManifoldMismatch, name + ": file holds " + t.header.manifold + " data, expected " + m.tag());
    const Shape shape(t.header.dims);
    if (t.rows.size() != shape.size())
        throw Error(ErrorCode::Parse, name + ": expected " + std::to_string(shape.size()) + " rows for dims " +
                                          shape.toString() + ", found " + std::to_string(t.rows.size()));
    std::vector<typename M::Point> pts;
    pts.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            if (static_cast<int>(row.size()) != m.rowWidth())
                throw Error(ErrorCode::Parse, "expected " + std::to_string(m.rowWidth()) + " columns, found " +
                                                  std::to_string(row.size()));
            pts.push_back(m.fromRow(row));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, name + ":" + std::to_string(t.lines[i]) + ": row " + std::to_string(i) + ": " + e.what());
        }
    }
    return Grid<M>(m, shape, std::move(pts));
}

template <class M>
Grid<M> readGrid(const M& m, const std::filesystem::path& path) {
    return gridFromTable(m, readGridTable(path), path.string());
}

template <class M>
void writeGridFile(const std::filesystem::path& path, const Grid<M>& g);

void writeTextFile(const std::filesystem::path& path, const std::string& text);

/// CSV with columns iteration, mu, data, regularizer, total.
std::string traceCsv(const std::vector<TraceRow>& trace);

template <class M>
nlohmann::json pyramidToJson(const Pyramid<M>& pyr) {
    const M& m = pyr.coarse.manifold;
    nlohmann::json j;
    j["manifold"] = m.tag();
    j["levels"] = pyr.levelCount;
    j["mask"] = toString(pyr.mask);
    j["boundary"] = pyr.boundary.toString();
    j["coarse"]["dims"] = pyr.coarse.shape.dims();
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : pyr.coarse.points) pts.push_back(m.toRow(p));
    j["coarse"]["points"] = std::move(pts);
    j["details"] = nlohmann::json::array();
    for (std::size_t r = 0; r < pyr.levels.size(); ++r) {
        const auto& level = pyr.levels[r];
        nlohmann::json lj;
        lj["level"] = r + 1;
        lj["dims"] = level.shape.dims();
        lj["coefficients"] = nlohmann::json::array();
        for (const auto& d : level.details) {
            lj["coefficients"].push_back({{"site", d.site},
                                          {"anchor", m.toRow(d.anchor)},
                                          {"coeff", tangentRow(m, d.coeff)},
                                          {"magnitude", m.norm(d.anchor, d.coeff)}});
        }
        j["details"].push_back(std::move(lj));
    }
    return j;
}

template <class M>
Pyramid<M> pyramidFromJson(const M& m, const nlohmann::json& j) {
    try {
        if (j.at("manifold").get<std::string>() != m.tag())
            throw Error(ErrorCode::ManifoldMismatch, "pyramid holds " + j.at("manifold").get<std::string>() +
                                                         " data, expected " + m.tag());
        Pyramid<M> pyr;
        pyr.levelCount = j.at("levels").get<int>();
        pyr.mask = parseMaskKind(j.at("mask").get<std::string>());
        pyr.boundary = BoundaryRule::parse(j.at("boundary").get<std::string>());
        const Shape coarse(j.at("coarse").at("dims").get<std::vector<int>>());
        std::vector<typename M::Point> pts;
        for (const auto& row : j.at("coarse").at("points")) pts.push_back(m.fromRow(row.get<std::vector<double>>()));
        pyr.coarse = Grid<M>(m, coarse, std::move(pts));
        for (const auto& lj : j.at("details")) {
            PyramidLevel<M> level;
            level.shape = Shape(lj.at("dims").get<std::vector<int>>());
            for (const auto& cj : lj.at("coefficients")) {
                DetailCoefficient<M> d;
                d.site = cj.at("site").get<MultiIndex>();
                d.anchor = m.fromRow(cj.at("anchor").get<std::vector<double>>());
                d.coeff = tangentFromRow(m, cj.at("coeff").get<std::vector<double>>());
                level.details.push_back(std::move(d));
            }
            pyr.levels.push_back(std::move(level));
        }
        return pyr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed pyramid: ") + e.what());
    }
}

/// Per-level CSV of detail magnitudes: one row per coefficient with its
/// level-grid site and the norm of the detail tangent.
template <class M>
std::string levelMagnitudeCsv(const Pyramid<M>& pyr, int r) {
    const M& m = pyr.coarse.manifold;
    const auto& level = pyr.levels.at(r - 1);
    std::string out = "# level=" + std::to_string(r) + " dims=";
    for (int a = 0; a < level.shape.rank(); ++a) out += (a ? "," : "") + std::to_string(level.shape.dim(a));
    out += "\n";
    for (int a = 0; a < level.shape.rank(); ++a) out += "i" + std::to_string(a) + ",";
    out += "magnitude\n";
    for (const auto& d : level.details) {
        for (int v : d.site) out += std::to_string(v) + ",";
        out += formatDouble(m.norm(d.anchor, d.coeff)) + "\n";
    }
    return out;
}

}  // namespace mvw
