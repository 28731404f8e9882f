#pragma once

// Adaptation planning: per-site threshold cost minimization, budget-constrained
// resilience maximization (multiple-choice knapsack), and the cost/resilience frontier.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crids/model.hpp"

namespace crids {

class InvalidInstance : public Error {
public:
    using Error::Error;
};

class InvalidBudget : public Error {
public:
    using Error::Error;
};

struct OptionRef {
    int id = 1;
    std::string name;
};

/// Dense site x option tables. Row i belongs to sites[i]; column l to options[l].
struct PlanningInstance {
    std::vector<std::string> sites;
    std::vector<OptionRef> options;
    std::vector<double> cost;        // c_il >= 0
    std::vector<double> index;       // post-adaptation index in [0, 1]
    std::vector<std::uint8_t> feasible;
    std::vector<double> thresholds;  // b_i in [0, 1]

    std::size_t site_count() const { return sites.size(); }
    std::size_t option_count() const { return options.size(); }
    std::size_t at(std::size_t site, std::size_t option) const { return site * options.size() + option; }

    /// Allocates tables for n sites and the given options; every pair starts feasible
    /// with zero cost and index.
    static PlanningInstance blank(std::vector<std::string> sites, std::vector<OptionRef> options);

    /// Throws InvalidInstance on shape or range violations, or when the do-nothing
    /// option (id 1) is missing or infeasible for some site.
    void validate() const;
};

/// Option ids admissible for `site`. Always contains the do-nothing option.
std::vector<int> feasible_options(const Site& site, std::span<const AdaptationOption> options);

/// Builds the planning tables from assessed sites. `scores[i]` must be the aggregated
/// membership vector of `sites[i]`.
PlanningInstance build_instance(std::span<const Site> sites, std::span<const MembershipVector> scores,
                                std::span<const AdaptationOption> options, std::span<const double> thresholds);

/// Cheapest feasible option meeting each site's threshold. Ties prefer the higher
/// index, then the lower option id. Sites with no qualifying option are listed in
/// Plan::infeasible_sites and left unassigned.
Plan min_cost_assignment(const PlanningInstance& instance);

enum class ResilienceObjective : std::uint8_t { Sum, Minimum };

struct BudgetOptions {
    double quantum = 1.0;  // cost unit for the knapsack tables; costs round up
    ResilienceObjective objective = ResilienceObjective::Sum;
    std::size_t max_table_cells = 400'000'000;
};

/// Exact maximization of total (or minimum) site index subject to the budget, one
/// feasible option per site. Ties prefer lower cost, then the lexicographically
/// smallest assignment in site/option order.
Plan max_resilience_under_budget(const PlanningInstance& instance, double budget,
                                 const BudgetOptions& opts = {});

struct FrontierPoint {
    double total_cost = 0.0;
    double total_index = 0.0;
    Plan plan;
};

/// Non-dominated (cost, total index) outcomes ordered by cost. Budgets range up to
/// `cost_cap` (default: the most expensive feasible plan).
std::vector<FrontierPoint> pareto_frontier(const PlanningInstance& instance,
                                           std::optional<double> cost_cap = std::nullopt,
                                           const BudgetOptions& opts = {});

/// Cost units per pair after rounding up to the quantum, plus the budget in units
/// (rounded down). Exposed for the run manifest and tests.
struct QuantizedCosts {
    std::vector<std::int64_t> units;
    std::int64_t budget_units = 0;
    std::int64_t scale = 1;  // common divisor removed from all units
};

QuantizedCosts quantize_costs(const PlanningInstance& instance, double budget, double quantum);

}  // namespace crids
