#include "mvw/regularizer.hpp"

namespace mvw {

void RegParams::validate() const {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "regularizer weights must be nonnegative");
    if (!(q == 0.0 || q >= 1.0)) throw Error(ErrorCode::InvalidArgument, "q must be 0 (l0) or at least 1");
    if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
    if (domainDim < 1) throw Error(ErrorCode::InvalidArgument, "domain dimension must be at least 1");
}

bool atomsConflict(const RegAtom& a, const RegAtom& b) { return sitesIntersect(a.touched, b.touched); }

std::vector<RegAtom> buildRegAtoms(const Shape& fine, int levels, const Mask& mask, const BoundaryRule& boundary,
                                   bool coarsePairs, bool details) {
    std::vector<RegAtom> out;
    if (coarsePairs) {
        const Shape coarse = fine.coarsened(levels);
        const int step = 1 << levels;
        MultiIndex scaled(fine.rank());
        auto fineIndex = [&](const MultiIndex& site) {
            for (int a = 0; a < fine.rank(); ++a) scaled[a] = site[a] * step;
            return fine.index(scaled);
        };
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            const MultiIndex site = coarse.site(i);
            for (int axis = 0; axis < coarse.rank(); ++axis) {
                MultiIndex prev = site;
                if (site[axis] > 0) {
                    prev[axis] -= 1;
                } else if (boundary.kind == BoundaryRule::Kind::Periodic && coarse.dim(axis) > 2) {
                    prev[axis] = coarse.dim(axis) - 1;
                } else {
                    continue;
                }
                RegAtom atom;
                atom.kind = RegAtom::Kind::CoarsePair;
                atom.site = site;
                atom.direction = axis;
                atom.target = fineIndex(site);
                atom.sources = {fineIndex(prev)};
                atom.weights = {1.0};
                atom.touched = sortedUnique({atom.target, atom.sources[0]});
                out.push_back(std::move(atom));
            }
        }
    }
    if (details) {
        for (int r = 1; r <= levels; ++r) {
            for (auto& st : levelStencils(fine, levels, r, mask, boundary)) {
                RegAtom atom;
                atom.kind = RegAtom::Kind::Detail;
                atom.level = r;
                atom.site = std::move(st.site);
                atom.target = st.target;
                atom.sources = std::move(st.sources);
                atom.weights = std::move(st.weights);
                std::vector<std::size_t> all = atom.sources;
                all.push_back(atom.target);
                atom.touched = sortedUnique(std::move(all));
                out.push_back(std::move(atom));
            }
        }
    }
    return out;
}

}  // namespace mvw
