#include "crids/aggregate.hpp"

namespace crids {

namespace {

std::vector<BlockNode> leaves_of(FactorCategory c) {
    std::vector<BlockNode> out;
    for (Factor f : factors_in(c)) out.push_back(BlockNode::make_leaf(f));
    return out;
}

void collect_leaves(const BlockNode& n, std::vector<Factor>& out) {
    if (n.kind == BlockNode::Kind::Leaf) {
        out.push_back(n.leaf);
        return;
    }
    for (const auto& c : n.children) collect_leaves(c, out);
}

template <class Lookup>
double evaluate(const BlockNode& n, const Lookup& lookup) {
    switch (n.kind) {
        case BlockNode::Kind::Leaf:
            return lookup(n.leaf);
        case BlockNode::Kind::Series: {
            double v = 1.0;
            for (const auto& c : n.children) v *= evaluate(c, lookup);
            return v;
        }
        case BlockNode::Kind::Parallel: {
            double miss = 1.0;
            for (const auto& c : n.children) miss *= 1.0 - evaluate(c, lookup);
            return 1.0 - miss;
        }
    }
    return 0.0;
}

}  // namespace

std::vector<Factor> BlockNode::leaves() const {
    std::vector<Factor> out;
    collect_leaves(*this, out);
    return out;
}

std::string BlockNode::to_string() const {
    if (kind == Kind::Leaf) return std::string(info(leaf).code);
    std::string s = kind == Kind::Series ? "series(" : "parallel(";
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) s += ", ";
        s += children[i].to_string();
    }
    return s + ")";
}

BlockDiagram default_block_diagram() {
    auto functionality = BlockNode::series(leaves_of(FactorCategory::Resistive));
    auto response = BlockNode::series({BlockNode::series(leaves_of(FactorCategory::Adaptive)),
                                       BlockNode::series(leaves_of(FactorCategory::Recovery))});
    return BlockNode::parallel({std::move(functionality), std::move(response)});
}

double derive_groundwater_contamination(double vsd_score, double wetland_score) {
    return vsd_score * wetland_score;
}

double category_score(const PerFactor<double>& scores, FactorCategory category) {
    double p = 1.0;
    for (const auto& fi : registry()) {
        if (fi.category == category) p *= scores[index_of(fi.factor)];
    }
    return p;
}

double cri_ds(double resistivity, double adaptability, double recovery) {
    return 1.0 - (1.0 - resistivity) * (1.0 - adaptability * recovery);
}

double evaluate_block_diagram(const BlockDiagram& diagram, const ScoreMap& scores,
                              std::optional<double> fallback) {
    return evaluate(diagram, [&](Factor f) {
        if (const auto& v = scores[index_of(f)]) return *v;
        if (fallback) return *fallback;
        throw UnknownLeaf(f);
    });
}

double evaluate_block_diagram(const BlockDiagram& diagram, const PerFactor<double>& scores) {
    return evaluate(diagram, [&](Factor f) { return scores[index_of(f)]; });
}

void aggregate(MembershipVector& mv, const BlockDiagram* diagram) {
    mv.scores[index_of(Factor::A4)] =
        derive_groundwater_contamination(mv.score(Factor::R3), mv.score(Factor::A1));
    mv.resistivity = category_score(mv.scores, FactorCategory::Resistive);
    mv.adaptability = category_score(mv.scores, FactorCategory::Adaptive);
    mv.recovery = category_score(mv.scores, FactorCategory::Recovery);
    mv.index = diagram ? evaluate_block_diagram(*diagram, mv.scores)
                       : cri_ds(mv.resistivity, mv.adaptability, mv.recovery);
}

double post_adaptation_cri(const PerFactor<double>& scores, const AdaptationOption& option) {
    auto masked = scores;
    for (Factor f : option.masked) masked[index_of(f)] = 1.0;
    switch (option.formula) {
        case IndexFormula::Full:
            break;
        case IndexFormula::Mound:
            for (Factor f : {Factor::R3, Factor::A4, Factor::A5}) masked[index_of(f)] = 1.0;
            break;
        case IndexFormula::RecoveryOnly:
            return category_score(masked, FactorCategory::Recovery);
    }
    return cri_ds(category_score(masked, FactorCategory::Resistive),
                  category_score(masked, FactorCategory::Adaptive),
                  category_score(masked, FactorCategory::Recovery));
}

}  // namespace crids
