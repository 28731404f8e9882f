#pragma once

// Series/parallel aggregation of membership scores into category scores and the
// composite resilience index.

#include <optional>
#include <string>
#include <vector>

#include "crids/model.hpp"

namespace crids {

class UnknownLeaf : public Error {
public:
    explicit UnknownLeaf(Factor f)
        : Error("block diagram leaf has no score: " + std::string(to_string(f))), factor(f) {}
    Factor factor;
};

/// Node of a reliability block diagram. Series multiplies child values; parallel
/// returns one minus the product of child complements.
struct BlockNode {
    enum class Kind : std::uint8_t { Leaf, Series, Parallel };

    Kind kind = Kind::Leaf;
    Factor leaf = Factor::R1;
    std::vector<BlockNode> children;

    static BlockNode make_leaf(Factor f) { return BlockNode{Kind::Leaf, f, {}}; }
    static BlockNode series(std::vector<BlockNode> c) { return BlockNode{Kind::Series, Factor::R1, std::move(c)}; }
    static BlockNode parallel(std::vector<BlockNode> c) { return BlockNode{Kind::Parallel, Factor::R1, std::move(c)}; }

    /// Leaves in depth-first order.
    std::vector<Factor> leaves() const;
    std::string to_string() const;
};

using BlockDiagram = BlockNode;

/// Parallel(Series(J), Series(Series(K), Series(Z))).
BlockDiagram default_block_diagram();

/// vsd_score x wetland_score.
double derive_groundwater_contamination(double vsd_score, double wetland_score);

/// Product over the category's factors in registry order.
double category_score(const PerFactor<double>& scores, FactorCategory category);

/// 1 - (1 - resistivity)(1 - adaptability x recovery).
double cri_ds(double resistivity, double adaptability, double recovery);

/// Evaluates the diagram. Leaves without a score take `fallback`; with no fallback
/// a missing leaf raises UnknownLeaf.
double evaluate_block_diagram(const BlockDiagram& diagram, const ScoreMap& scores,
                              std::optional<double> fallback = 1.0);
double evaluate_block_diagram(const BlockDiagram& diagram, const PerFactor<double>& scores);

/// Recomputes A4 from R3 and A1, then fills the three category scores and the index.
/// A non-null `diagram` replaces the closed form for the index.
void aggregate(MembershipVector& mv, const BlockDiagram* diagram = nullptr);

/// Index after applying `option`: its masked factors score 1, then the option's
/// formula is evaluated. `scores` must already carry the derived A4.
double post_adaptation_cri(const PerFactor<double>& scores, const AdaptationOption& option);

}  // namespace crids
