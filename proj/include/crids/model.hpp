#pragma once

// Domain types shared by the fuzzify, aggregate, geo, plan and io layers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crids {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Factor registry
// ---------------------------------------------------------------------------

enum class FactorCategory : std::uint8_t { Resistive, Adaptive, Recovery };

// Registry order: resistive (J), adaptive (K), recovery (Z).
enum class Factor : std::uint8_t {
    R1, R2, R3,
    A1, A2, A3, A4, A5, A6, A7, A8,
    Re1, Re2, Re3, Re4,
};

inline constexpr std::size_t kFactorCount = 15;

struct FactorInfo {
    Factor factor;
    FactorCategory category;
    int ordinal;             // 1-based within the category
    std::string_view code;   // "R3", "A4", "Re1", ...
    std::string_view name;   // stable snake_case identifier
};

/// The 15 canonical factors in category order.
std::span<const FactorInfo> registry();

const FactorInfo& info(Factor f);
constexpr std::size_t index_of(Factor f) { return static_cast<std::size_t>(f); }
std::string_view to_string(Factor f);
std::string_view to_string(FactorCategory c);

/// Accepts either the snake_case name or the short code.
std::optional<Factor> parse_factor(std::string_view text);

std::vector<Factor> factors_in(FactorCategory c);

template <class T>
using PerFactor = std::array<T, kFactorCount>;

using RawValues = PerFactor<std::optional<double>>;
using ScoreMap = PerFactor<std::optional<double>>;
using FactorSet = std::set<Factor>;

// ---------------------------------------------------------------------------
// Sites and membership
// ---------------------------------------------------------------------------

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Site {
    std::string id;
    Point point;
    RawValues raw{};
    std::map<std::string, std::string> metadata;

    std::optional<double> value(Factor f) const { return raw[index_of(f)]; }
    friend bool operator==(const Site&, const Site&) = default;
};

struct MembershipVector {
    PerFactor<double> scores = filled(1.0);
    double resistivity = 1.0;
    double adaptability = 1.0;
    double recovery = 1.0;
    double index = 1.0;

    double score(Factor f) const { return scores[index_of(f)]; }

    static PerFactor<double> filled(double v) {
        PerFactor<double> a{};
        a.fill(v);
        return a;
    }
};

// ---------------------------------------------------------------------------
// Transform specification
// ---------------------------------------------------------------------------

enum class TransformKind : std::uint8_t { Sigmoid, InverseSigmoid, Grade, InverseGrade, Passthrough };
enum class ReferenceMode : std::uint8_t { Fixed, MedianOfDataset };

std::string_view to_string(TransformKind k);
std::optional<TransformKind> parse_transform_kind(std::string_view text);

struct FactorTransformSpec {
    TransformKind kind = TransformKind::Passthrough;
    double shape = 1.0;                         // f1, sigmoid family only
    ReferenceMode reference_mode = ReferenceMode::Fixed;
    double reference = 1.0;                     // f2 when Fixed
    double x_min = 0.0;                         // grade family only
    double x_max = 1.0;

    /// Throws InvalidParameter when the parameters are inadmissible for `kind`.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct Scenario {
    std::string name = "current";
    double sea_level_rise = 0.0;                // ft
    double groundwater_response_ratio = 0.345;  // groundwater rise per unit SLR
    double drainfield_depth = 3.0;              // ft

    double groundwater_rise() const { return sea_level_rise * groundwater_response_ratio; }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Adaptation options
// ---------------------------------------------------------------------------

enum class OptionKind : std::uint8_t {
    DoNothing = 1,
    SewerExtension = 2,
    MoundSystem = 3,
    CommunityTreatment = 4,
    OnsiteTreatment = 5,
};

enum class IndexFormula : std::uint8_t { Full, RecoveryOnly, Mound };

std::string_view to_string(OptionKind k);
std::optional<OptionKind> parse_option_kind(std::string_view text);
std::string_view to_string(IndexFormula f);
std::optional<IndexFormula> parse_index_formula(std::string_view text);

enum class Comparison : std::uint8_t { Less, LessEqual, Greater, GreaterEqual, Equal };

std::optional<Comparison> parse_comparison(std::string_view text);
std::string_view to_string(Comparison c);

/// Excludes an option for a site when `raw[factor] <op> value`. Absent raw values never exclude.
struct ExclusionRule {
    Factor factor;
    Comparison op;
    double value;

    bool excludes(const Site& site) const;
};

struct CostModel {
    double flat = 0.0;
    std::map<std::string, double> per_site;

    double cost_for(const std::string& site_id) const;
};

struct AdaptationOption {
    int id = 1;
    OptionKind kind = OptionKind::DoNothing;
    std::string name;
    CostModel cost;
    FactorSet masked;
    IndexFormula formula = IndexFormula::Full;
    std::vector<ExclusionRule> exclusions;

    bool feasible_for(const Site& site) const;
};

/// Moratorium flag threshold on raw[Re4] and minimum VSD (ft) for a mound system.
inline constexpr double kMoratoriumFlag = 0.5;
inline constexpr double kMinMoundSeparation = 1.0;

/// The five stock options with their masks, formulas and built-in feasibility rules.
/// Costs are zero; callers attach cost models.
std::vector<AdaptationOption> default_options();

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

enum class PlanStatus : std::uint8_t { Optimal, Infeasible };

struct Plan {
    std::vector<std::string> sites;
    std::vector<std::optional<int>> assignment;   // option id per site
    std::vector<double> per_site_cost;
    std::vector<double> per_site_index;
    double total_cost = 0.0;
    double objective = 0.0;
    PlanStatus status = PlanStatus::Optimal;
    std::vector<std::string> infeasible_sites;
};

}  // namespace crids
