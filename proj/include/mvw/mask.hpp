#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvw/grid.hpp"

namespace mvw {

enum class MaskKind { FirstOrder, DD3 };

const char* toString(MaskKind kind);
MaskKind parseMaskKind(const std::string& name);

/// Tensor-product interpolatory subdivision mask.
class Mask {
public:
    Mask(MaskKind kind, int dimension);

    MaskKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    const std::map<int, double>& univariate() const { return univariate_; }
    double univariate(int offset) const;
    double coefficient(std::span<const int> offset) const;
    /// All nonzero coefficients of the s-variate mask.
    std::map<MultiIndex, double> coefficients() const;
    /// Degree of polynomials reproduced by the scheme.
    int reproductionDegree() const;

private:
    MaskKind kind_;
    int dimension_;
    std::map<int, double> univariate_;
};

Mask makeMask(MaskKind kind, int dimension);

struct BoundaryRule {
    enum class Kind { Periodic, Reflect, PolynomialFit };
    Kind kind = Kind::Reflect;
    int order = 0;

    static BoundaryRule periodic() { return {Kind::Periodic, 0}; }
    static BoundaryRule reflect() { return {Kind::Reflect, 0}; }
    static BoundaryRule polynomialFit(int k) { return {Kind::PolynomialFit, k}; }

    std::string toString() const;
    static BoundaryRule parse(const std::string& text);
    bool operator==(const BoundaryRule&) const = default;
};

/// Checks that the rule can be used together with the mask.
void validateBoundary(const BoundaryRule& rule, const Mask& mask);

/// Maps an out-of-range index into [0, length) for Periodic and Reflect.
/// Returns -1 for PolynomialFit when the index is out of range.
int mapIndex(int index, int length, const BoundaryRule& rule);

using WeightedIndex = std::pair<int, double>;
using WeightedSite = std::pair<std::size_t, double>;

/// Weights on coarse samples 0..coarseLength-1 predicting fine position `fine`
/// (which sits at coarse coordinate fine/2).
std::vector<WeightedIndex> univariateStencil(int fine, int coarseLength, const Mask& mask, const BoundaryRule& rule);

/// Tensor product of univariate stencils, returned as linear indices into `coarse`
/// with duplicate sites merged. Order follows the coarse row-major order.
std::vector<WeightedSite> subdivisionStencil(std::span<const int> fineSite, const Shape& coarse, const Mask& mask,
                                             const BoundaryRule& rule);

bool isEvenSite(std::span<const int> site);

/// One odd site of a given level, expressed in fine-grid linear indices.
struct PredictionStencil {
    int level = 0;
    MultiIndex site;                    // position on the level-r grid
    std::size_t target = 0;             // fine-grid index of the predicted sample
    std::vector<std::size_t> sources;   // fine-grid indices of the level r-1 contributors
    std::vector<double> weights;
};

/// Prediction stencils of all odd sites of level r (1..levels), in row-major order of the level grid.
std::vector<PredictionStencil> levelStencils(const Shape& fine, int levels, int r, const Mask& mask,
                                             const BoundaryRule& rule);

}  // namespace mvw
