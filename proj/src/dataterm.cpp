#include "mvw/dataterm.hpp"

#include <map>

namespace mvw {

ImagingOperator ImagingOperator::inpaint(std::vector<bool> keep) {
    ImagingOperator op;
    op.kind = Kind::InpaintMask;
    op.keep = std::move(keep);
    return op;
}

ImagingOperator ImagingOperator::meanKernel(std::vector<double> taps, BoundaryRule boundary) {
    if (taps.empty() || taps.size() % 2 == 0) throw Error(ErrorCode::InvalidArgument, "kernel needs an odd number of taps");
    double sum = 0.0;
    for (double t : taps) {
        if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel taps must be nonnegative");
        sum += t;
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel taps must have a positive sum");
    ImagingOperator op;
    op.kind = Kind::MeanKernel;
    op.kernel = std::move(taps);
    op.boundary = boundary;
    return op;
}

ImagingOperator ImagingOperator::gaussian(double sigma, int window, BoundaryRule boundary) {
    return meanKernel(gaussianTaps(sigma, window), boundary);
}

std::string ImagingOperator::describe() const {
    switch (kind) {
        case Kind::Identity: return "identity";
        case Kind::InpaintMask: return "inpaint";
        case Kind::MeanKernel: return "kernel(" + std::to_string(kernel.size()) + " taps, " + boundary.toString() + ")";
    }
    return "?";
}

std::vector<double> gaussianTaps(double sigma, int window) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel sigma must be positive");
    if (window < 1 || window % 2 == 0) throw Error(ErrorCode::InvalidArgument, "kernel window must be odd and positive");
    const int half = window / 2;
    std::vector<double> taps;
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        taps.push_back(std::exp(-0.5 * k * k / (sigma * sigma)));
        sum += taps.back();
    }
    for (double& t : taps) t /= sum;
    return taps;
}

std::vector<DataAtom> buildDataAtoms(const Shape& shape, const ImagingOperator& op) {
    std::vector<DataAtom> out;
    switch (op.kind) {
        case ImagingOperator::Kind::Identity:
        case ImagingOperator::Kind::InpaintMask: {
            if (op.kind == ImagingOperator::Kind::InpaintMask && op.keep.size() != shape.size())
                throw Error(ErrorCode::InvalidArgument, "inpainting mask does not match the grid size");
            for (std::size_t i = 0; i < shape.size(); ++i) {
                if (op.kind == ImagingOperator::Kind::InpaintMask && !op.keep[i]) continue;
                out.push_back({i, {i}, {1.0}, {i}});
            }
            return out;
        }
        case ImagingOperator::Kind::MeanKernel: break;
    }
    const int half = static_cast<int>(op.kernel.size()) / 2;
    const int rank = shape.rank();
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const MultiIndex site = shape.site(i);
        std::map<std::size_t, double> row;
        MultiIndex offset(rank, -half), neighbour(rank);
        while (true) {
            double w = 1.0;
            bool inside = true;
            for (int a = 0; a < rank && inside; ++a) {
                const int j = mapIndex(site[a] + offset[a], shape.dim(a), op.boundary);
                if (j < 0) inside = false;
                neighbour[a] = j;
                w *= op.kernel[offset[a] + half];
            }
            if (inside && w > 0.0) row[shape.index(neighbour)] += w;
            int a = rank - 1;
            while (a >= 0 && offset[a] == half) offset[a--] = -half;
            if (a < 0) break;
            ++offset[a];
        }
        DataAtom atom;
        atom.site = i;
        double sum = 0.0;
        for (const auto& [k, w] : row) sum += w;
        for (const auto& [k, w] : row) {
            atom.sources.push_back(k);
            atom.weights.push_back(w / sum);
        }
        atom.touched = atom.sources;
        out.push_back(std::move(atom));
    }
    return out;
}

}  // namespace mvw
