#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mvw/grid.hpp"

namespace mvw {

/// A sparse field of tangent vectors keyed by grid index.
template <class M>
struct SparseGradient {
    std::vector<std::pair<std::size_t, typename M::Vec>> entries;
    /// False when the atom is not differentiable at the evaluation point; the
    /// entries then hold the zero subgradient.
    bool differentiable = true;
};

/// Per-atom bookkeeping reported by prox and trajectory steps.
struct AtomOutcome {
    bool skipped = false;
    bool stalled = false;
    bool lineSearchFailed = false;
    bool nonDifferentiable = false;
    std::string reason;
};

/// Sorted grid indices touched by an atom.
std::vector<std::size_t> sortedUnique(std::vector<std::size_t> sites);

/// True when the two sorted site lists intersect.
bool sitesIntersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace mvw
