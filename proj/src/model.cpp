#include "crids/model.hpp"

#include <algorithm>
#include <cmath>

namespace crids {

namespace {

constexpr std::array<FactorInfo, kFactorCount> kRegistry{{
    {Factor::R1, FactorCategory::Resistive, 1, "R1", "capacity_redundancy"},
    {Factor::R2, FactorCategory::Resistive, 2, "R2", "flood_exposure"},
    {Factor::R3, FactorCategory::Resistive, 3, "R3", "vertical_separation"},
    {Factor::A1, FactorCategory::Adaptive, 1, "A1", "wetland_distance"},
    {Factor::A2, FactorCategory::Adaptive, 2, "A2", "wellfield_protection_zone"},
    {Factor::A3, FactorCategory::Adaptive, 3, "A3", "wellhead_distance"},
    {Factor::A4, FactorCategory::Adaptive, 4, "A4", "groundwater_contamination"},
    {Factor::A5, FactorCategory::Adaptive, 5, "A5", "system_age"},
    {Factor::A6, FactorCategory::Adaptive, 6, "A6", "canal_distance"},
    {Factor::A7, FactorCategory::Adaptive, 7, "A7", "drainage_distance"},
    {Factor::A8, FactorCategory::Adaptive, 8, "A8", "land_use"},
    {Factor::Re1, FactorCategory::Recovery, 1, "Re1", "sewer_distance"},
    {Factor::Re2, FactorCategory::Recovery, 2, "Re2", "median_household_income"},
    {Factor::Re3, FactorCategory::Recovery, 3, "Re3", "overflow_distance"},
    {Factor::Re4, FactorCategory::Recovery, 4, "Re4", "moratorium_status"},
}};

bool is_finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::span<const FactorInfo> registry() { return kRegistry; }

const FactorInfo& info(Factor f) { return kRegistry[index_of(f)]; }

std::string_view to_string(Factor f) { return info(f).name; }

std::string_view to_string(FactorCategory c) {
    switch (c) {
        case FactorCategory::Resistive: return "resistive";
        case FactorCategory::Adaptive: return "adaptive";
        case FactorCategory::Recovery: return "recovery";
    }
    return "?";
}

std::optional<Factor> parse_factor(std::string_view text) {
    for (const auto& fi : kRegistry) {
        if (fi.name == text || fi.code == text) return fi.factor;
    }
    return std::nullopt;
}

std::vector<Factor> factors_in(FactorCategory c) {
    std::vector<Factor> out;
    for (const auto& fi : kRegistry) {
        if (fi.category == c) out.push_back(fi.factor);
    }
    return out;
}

std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Sigmoid: return "sigmoid";
        case TransformKind::InverseSigmoid: return "inverse_sigmoid";
        case TransformKind::Grade: return "grade";
        case TransformKind::InverseGrade: return "inverse_grade";
        case TransformKind::Passthrough: return "passthrough";
    }
    return "?";
}

std::optional<TransformKind> parse_transform_kind(std::string_view text) {
    for (auto k : {TransformKind::Sigmoid, TransformKind::InverseSigmoid, TransformKind::Grade,
                   TransformKind::InverseGrade, TransformKind::Passthrough}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

void FactorTransformSpec::validate() const {
    switch (kind) {
        case TransformKind::Sigmoid:
        case TransformKind::InverseSigmoid:
            if (!is_finite_positive(shape)) {
                throw InvalidParameter("shape parameter f1 must be > 0");
            }
            if (reference_mode == ReferenceMode::Fixed && !is_finite_positive(reference)) {
                throw InvalidParameter("reference value f2 must be > 0");
            }
            break;
        case TransformKind::Grade:
        case TransformKind::InverseGrade:
            if (!(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max)) {
                throw InvalidParameter("grade bounds require x_min < x_max");
            }
            break;
        case TransformKind::Passthrough:
            break;
    }
}

void Scenario::validate() const {
    if (!(std::isfinite(sea_level_rise) && sea_level_rise >= 0.0)) {
        throw InvalidParameter("sea_level_rise must be >= 0");
    }
    if (!(groundwater_response_ratio >= 0.0 && groundwater_response_ratio <= 1.0)) {
        throw InvalidParameter("groundwater_response_ratio must lie in [0, 1]");
    }
    if (!std::isfinite(drainfield_depth)) {
        throw InvalidParameter("drainfield_depth must be finite");
    }
}

std::string_view to_string(OptionKind k) {
    switch (k) {
        case OptionKind::DoNothing: return "DoNothing";
        case OptionKind::SewerExtension: return "SewerExtension";
        case OptionKind::MoundSystem: return "MoundSystem";
        case OptionKind::CommunityTreatment: return "CommunityTreatment";
        case OptionKind::OnsiteTreatment: return "OnsiteTreatment";
    }
    return "?";
}

std::optional<OptionKind> parse_option_kind(std::string_view text) {
    for (int i = 1; i <= 5; ++i) {
        auto k = static_cast<OptionKind>(i);
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::string_view to_string(IndexFormula f) {
    switch (f) {
        case IndexFormula::Full: return "full";
        case IndexFormula::RecoveryOnly: return "recovery_only";
        case IndexFormula::Mound: return "mound";
    }
    return "?";
}

std::optional<IndexFormula> parse_index_formula(std::string_view text) {
    for (auto f : {IndexFormula::Full, IndexFormula::RecoveryOnly, IndexFormula::Mound}) {
        if (to_string(f) == text) return f;
    }
    return std::nullopt;
}

std::optional<Comparison> parse_comparison(std::string_view text) {
    if (text == "<") return Comparison::Less;
    if (text == "<=") return Comparison::LessEqual;
    if (text == ">") return Comparison::Greater;
    if (text == ">=") return Comparison::GreaterEqual;
    if (text == "==") return Comparison::Equal;
    return std::nullopt;
}

std::string_view to_string(Comparison c) {
    switch (c) {
        case Comparison::Less: return "<";
        case Comparison::LessEqual: return "<=";
        case Comparison::Greater: return ">";
        case Comparison::GreaterEqual: return ">=";
        case Comparison::Equal: return "==";
    }
    return "?";
}

bool ExclusionRule::excludes(const Site& site) const {
    const auto v = site.value(factor);
    if (!v) return false;
    switch (op) {
        case Comparison::Less: return *v < value;
        case Comparison::LessEqual: return *v <= value;
        case Comparison::Greater: return *v > value;
        case Comparison::GreaterEqual: return *v >= value;
        case Comparison::Equal: return *v == value;
    }
    return false;
}

double CostModel::cost_for(const std::string& site_id) const {
    if (auto it = per_site.find(site_id); it != per_site.end()) return it->second;
    return flat;
}

bool AdaptationOption::feasible_for(const Site& site) const {
    return std::none_of(exclusions.begin(), exclusions.end(),
                        [&](const ExclusionRule& r) { return r.excludes(site); });
}

std::vector<AdaptationOption> default_options() {
    const FactorSet mound_mask{Factor::R3, Factor::A4, Factor::A5};
    std::vector<AdaptationOption> out;

    AdaptationOption nothing;
    nothing.id = 1;
    nothing.kind = OptionKind::DoNothing;
    out.push_back(nothing);

    AdaptationOption sewer;
    sewer.id = 2;
    sewer.kind = OptionKind::SewerExtension;
    sewer.formula = IndexFormula::RecoveryOnly;
    sewer.exclusions.push_back({Factor::Re4, Comparison::GreaterEqual, kMoratoriumFlag});
    out.push_back(sewer);

    AdaptationOption mound;
    mound.id = 3;
    mound.kind = OptionKind::MoundSystem;
    mound.formula = IndexFormula::Mound;
    mound.masked = mound_mask;
    mound.exclusions.push_back({Factor::R3, Comparison::Less, kMinMoundSeparation});
    out.push_back(mound);

    AdaptationOption community;
    community.id = 4;
    community.kind = OptionKind::CommunityTreatment;
    community.formula = IndexFormula::RecoveryOnly;
    out.push_back(community);

    AdaptationOption onsite;
    onsite.id = 5;
    onsite.kind = OptionKind::OnsiteTreatment;
    onsite.formula = IndexFormula::Mound;
    onsite.masked = mound_mask;
    out.push_back(onsite);

    for (auto& o : out) o.name = std::string(to_string(o.kind));
    return out;
}

}  // namespace crids
