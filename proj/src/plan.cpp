#include "crids/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crids/aggregate.hpp"

namespace crids {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kNoCost = std::numeric_limits<std::int64_t>::max();

// Column order used for every tie-break: ascending option id.
std::vector<std::size_t> columns_by_id(const PlanningInstance& inst) {
    std::vector<std::size_t> cols(inst.option_count());
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(),
                     [&](std::size_t a, std::size_t b) { return inst.options[a].id < inst.options[b].id; });
    return cols;
}

Plan empty_plan(const PlanningInstance& inst) {
    Plan p;
    p.sites = inst.sites;
    p.assignment.assign(inst.site_count(), std::nullopt);
    p.per_site_cost.assign(inst.site_count(), 0.0);
    p.per_site_index.assign(inst.site_count(), 0.0);
    return p;
}

void assign(Plan& plan, const PlanningInstance& inst, std::size_t site, std::size_t col) {
    plan.assignment[site] = inst.options[col].id;
    plan.per_site_cost[site] = inst.cost[inst.at(site, col)];
    plan.per_site_index[site] = inst.index[inst.at(site, col)];
}

void finish_totals(Plan& plan) {
    plan.total_cost = 0.0;
    for (std::size_t i = 0; i < plan.sites.size(); ++i) {
        if (plan.assignment[i]) plan.total_cost += plan.per_site_cost[i];
    }
}

// Suffix tables of the multiple-choice knapsack: value[i][b] is the best total index of
// sites i..n-1 within b cost units, spent[i][b] the least cost reaching it.
struct KnapsackTables {
    std::size_t width = 0;
    std::vector<double> value;
    std::vector<std::int64_t> spent;
};

KnapsackTables solve_knapsack(const PlanningInstance& inst, const QuantizedCosts& q,
                              const std::vector<std::size_t>& cols, std::int64_t budget_units,
                              std::size_t max_cells) {
    const std::size_t n = inst.site_count();
    KnapsackTables t;
    t.width = static_cast<std::size_t>(budget_units) + 1;
    if ((n + 1) > max_cells / t.width) {
        throw InvalidBudget("knapsack table of " + std::to_string(n + 1) + " x " + std::to_string(t.width) +
                            " cells exceeds the limit; use a coarser cost quantum");
    }
    t.value.assign((n + 1) * t.width, 0.0);
    t.spent.assign((n + 1) * t.width, 0);
    for (std::size_t i = n; i-- > 0;) {
        const double* next_v = &t.value[(i + 1) * t.width];
        const std::int64_t* next_c = &t.spent[(i + 1) * t.width];
        double* cur_v = &t.value[i * t.width];
        std::int64_t* cur_c = &t.spent[i * t.width];
        for (std::size_t b = 0; b < t.width; ++b) {
            double best = kNegInf;
            std::int64_t best_cost = kNoCost;
            for (auto col : cols) {
                const auto k = inst.at(i, col);
                if (!inst.feasible[k]) continue;
                const auto u = static_cast<std::size_t>(q.units[k]);
                if (u > b || next_v[b - u] == kNegInf) continue;
                const double v = inst.index[k] + next_v[b - u];
                const std::int64_t c = q.units[k] + next_c[b - u];
                if (v > best || (v == best && c < best_cost)) {
                    best = v;
                    best_cost = c;
                }
            }
            cur_v[b] = best;
            cur_c[b] = best_cost;
        }
    }
    return t;
}

Plan reconstruct(const PlanningInstance& inst, const QuantizedCosts& q, const std::vector<std::size_t>& cols,
                 const KnapsackTables& t, std::size_t budget) {
    Plan plan = empty_plan(inst);
    plan.objective = t.value[budget];
    std::size_t b = budget;
    for (std::size_t i = 0; i < inst.site_count(); ++i) {
        const double target = t.value[i * t.width + b];
        const std::int64_t target_cost = t.spent[i * t.width + b];
        const double* next_v = &t.value[(i + 1) * t.width];
        const std::int64_t* next_c = &t.spent[(i + 1) * t.width];
        for (auto col : cols) {
            const auto k = inst.at(i, col);
            if (!inst.feasible[k]) continue;
            const auto u = static_cast<std::size_t>(q.units[k]);
            if (u > b || next_v[b - u] == kNegInf) continue;
            if (inst.index[k] + next_v[b - u] == target && q.units[k] + next_c[b - u] == target_cost) {
                assign(plan, inst, i, col);
                b -= u;
                break;
            }
        }
    }
    finish_totals(plan);
    return plan;
}

std::int64_t min_feasible_units(const PlanningInstance& inst, const QuantizedCosts& q, std::size_t i) {
    std::int64_t m = kNoCost;
    for (std::size_t l = 0; l < inst.option_count(); ++l) {
        const auto k = inst.at(i, l);
        if (inst.feasible[k]) m = std::min(m, q.units[k]);
    }
    return m;
}

}  // namespace

PlanningInstance PlanningInstance::blank(std::vector<std::string> sites, std::vector<OptionRef> options) {
    PlanningInstance inst;
    inst.sites = std::move(sites);
    inst.options = std::move(options);
    const auto cells = inst.sites.size() * inst.options.size();
    inst.cost.assign(cells, 0.0);
    inst.index.assign(cells, 0.0);
    inst.feasible.assign(cells, 1);
    inst.thresholds.assign(inst.sites.size(), 0.0);
    return inst;
}

void PlanningInstance::validate() const {
    const auto cells = site_count() * option_count();
    if (cost.size() != cells || index.size() != cells || feasible.size() != cells) {
        throw InvalidInstance("planning tables do not match sites x options");
    }
    if (thresholds.size() != site_count()) throw InvalidInstance("one threshold per site required");
    auto nothing = std::find_if(options.begin(), options.end(), [](const OptionRef& o) { return o.id == 1; });
    if (nothing == options.end()) throw InvalidInstance("do-nothing option (id 1) missing");
    const auto nothing_col = static_cast<std::size_t>(nothing - options.begin());
    for (std::size_t i = 0; i < site_count(); ++i) {
        if (!feasible[at(i, nothing_col)]) {
            throw InvalidInstance("do-nothing option infeasible for site " + sites[i]);
        }
        if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
            throw InvalidInstance("threshold outside [0, 1] for site " + sites[i]);
        }
        for (std::size_t l = 0; l < option_count(); ++l) {
            const auto k = at(i, l);
            if (!(std::isfinite(cost[k]) && cost[k] >= 0.0)) {
                throw InvalidInstance("negative or non-finite cost for site " + sites[i]);
            }
            if (!(index[k] >= 0.0 && index[k] <= 1.0)) {
                throw InvalidInstance("index outside [0, 1] for site " + sites[i]);
            }
        }
    }
}

std::vector<int> feasible_options(const Site& site, std::span<const AdaptationOption> options) {
    std::vector<int> ids;
    for (const auto& o : options) {
        if (o.kind == OptionKind::DoNothing || o.feasible_for(site)) ids.push_back(o.id);
    }
    return ids;
}

PlanningInstance build_instance(std::span<const Site> sites, std::span<const MembershipVector> scores,
                                std::span<const AdaptationOption> options, std::span<const double> thresholds) {
    if (scores.size() != sites.size()) throw InvalidInstance("one membership vector per site required");
    if (thresholds.size() != 1 && thresholds.size() != sites.size()) {
        throw InvalidInstance("thresholds must be a scalar or one per site");
    }
    std::vector<std::string> ids;
    for (const auto& s : sites) ids.push_back(s.id);
    std::vector<OptionRef> refs;
    for (const auto& o : options) refs.push_back({o.id, o.name});
    auto inst = PlanningInstance::blank(std::move(ids), std::move(refs));
    for (std::size_t i = 0; i < sites.size(); ++i) {
        inst.thresholds[i] = thresholds.size() == 1 ? thresholds[0] : thresholds[i];
        for (std::size_t l = 0; l < options.size(); ++l) {
            const auto& o = options[l];
            const auto k = inst.at(i, l);
            inst.cost[k] = o.cost.cost_for(sites[i].id);
            inst.index[k] = post_adaptation_cri(scores[i].scores, o);
            inst.feasible[k] = (o.kind == OptionKind::DoNothing || o.feasible_for(sites[i])) ? 1 : 0;
        }
    }
    return inst;
}

Plan min_cost_assignment(const PlanningInstance& inst) {
    inst.validate();
    const auto cols = columns_by_id(inst);
    Plan plan = empty_plan(inst);
    for (std::size_t i = 0; i < inst.site_count(); ++i) {
        std::optional<std::size_t> best;
        for (auto col : cols) {
            const auto k = inst.at(i, col);
            if (!inst.feasible[k] || inst.index[k] < inst.thresholds[i]) continue;
            if (!best) {
                best = col;
                continue;
            }
            const auto bk = inst.at(i, *best);
            if (inst.cost[k] < inst.cost[bk] || (inst.cost[k] == inst.cost[bk] && inst.index[k] > inst.index[bk])) {
                best = col;
            }
        }
        if (best) {
            assign(plan, inst, i, *best);
        } else {
            plan.infeasible_sites.push_back(inst.sites[i]);
        }
    }
    plan.status = plan.infeasible_sites.empty() ? PlanStatus::Optimal : PlanStatus::Infeasible;
    finish_totals(plan);
    plan.objective = plan.total_cost;
    return plan;
}

QuantizedCosts quantize_costs(const PlanningInstance& inst, double budget, double quantum) {
    if (!(std::isfinite(quantum) && quantum > 0.0)) throw InvalidBudget("cost quantum must be > 0");
    if (!(std::isfinite(budget) && budget >= 0.0)) throw InvalidBudget("budget must be >= 0");
    constexpr double kSlack = 1e-9;
    QuantizedCosts q;
    q.units.resize(inst.cost.size());
    std::int64_t g = 0;
    for (std::size_t k = 0; k < inst.cost.size(); ++k) {
        const double scaled = inst.cost[k] / quantum;
        if (scaled > 9e15) throw InvalidBudget("cost too large for the quantum");
        q.units[k] = static_cast<std::int64_t>(std::ceil(scaled - kSlack));
        if (q.units[k] < 0) q.units[k] = 0;
        if (inst.feasible[k]) g = std::gcd(g, q.units[k]);
    }
    const double scaled_budget = budget / quantum;
    q.budget_units = scaled_budget > 9e15 ? static_cast<std::int64_t>(9e15)
                                          : static_cast<std::int64_t>(std::floor(scaled_budget + kSlack));
    if (g > 1) {
        q.scale = g;
        for (std::size_t k = 0; k < q.units.size(); ++k) {
            if (inst.feasible[k]) q.units[k] /= g;
        }
        q.budget_units /= g;
    }
    return q;
}

Plan max_resilience_under_budget(const PlanningInstance& inst, double budget, const BudgetOptions& opts) {
    inst.validate();
    const auto q = quantize_costs(inst, budget, opts.quantum);
    const auto cols = columns_by_id(inst);

    std::int64_t floor_units = 0;
    for (std::size_t i = 0; i < inst.site_count(); ++i) floor_units += min_feasible_units(inst, q, i);
    if (floor_units > q.budget_units) {
        throw InvalidBudget("budget is below the cheapest feasible plan");
    }

    if (opts.objective == ResilienceObjective::Minimum) {
        std::vector<double> levels;
        for (std::size_t k = 0; k < inst.index.size(); ++k) {
            if (inst.feasible[k]) levels.push_back(inst.index[k]);
        }
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

        // Cheapest plan in which every site reaches `level`, with ties as in min_cost_assignment.
        auto plan_at = [&](double level) -> std::optional<Plan> {
            Plan plan = empty_plan(inst);
            std::int64_t units = 0;
            for (std::size_t i = 0; i < inst.site_count(); ++i) {
                std::optional<std::size_t> best;
                for (auto col : cols) {
                    const auto k = inst.at(i, col);
                    if (!inst.feasible[k] || inst.index[k] < level) continue;
                    if (!best) {
                        best = col;
                        continue;
                    }
                    const auto bk = inst.at(i, *best);
                    if (q.units[k] < q.units[bk] || (q.units[k] == q.units[bk] && inst.index[k] > inst.index[bk])) {
                        best = col;
                    }
                }
                if (!best) return std::nullopt;
                units += q.units[inst.at(i, *best)];
                assign(plan, inst, i, *best);
            }
            if (units > q.budget_units) return std::nullopt;
            return plan;
        };

        std::size_t lo = 0, hi = levels.size();  // levels[lo] attainable, levels[hi] not
        while (hi - lo > 1) {
            const auto mid = lo + (hi - lo) / 2;
            (plan_at(levels[mid]) ? lo : hi) = mid;
        }
        auto plan = levels.empty() ? std::optional<Plan>(empty_plan(inst)) : plan_at(levels[lo]);
        if (!plan) throw InvalidBudget("budget is below the cheapest feasible plan");
        finish_totals(*plan);
        plan->objective = plan->per_site_index.empty()
                              ? 0.0
                              : *std::min_element(plan->per_site_index.begin(), plan->per_site_index.end());
        return *plan;
    }

    // Sum objective: spending beyond the total of the most expensive options never helps.
    std::int64_t ceiling = 0;
    for (std::size_t i = 0; i < inst.site_count(); ++i) {
        std::int64_t m = 0;
        for (std::size_t l = 0; l < inst.option_count(); ++l) {
            const auto k = inst.at(i, l);
            if (inst.feasible[k]) m = std::max(m, q.units[k]);
        }
        ceiling += m;
    }
    const auto budget_units = std::min(q.budget_units, ceiling);
    const auto tables = solve_knapsack(inst, q, cols, budget_units, opts.max_table_cells);
    return reconstruct(inst, q, cols, tables, static_cast<std::size_t>(budget_units));
}

std::vector<FrontierPoint> pareto_frontier(const PlanningInstance& inst, std::optional<double> cost_cap,
                                           const BudgetOptions& opts) {
    inst.validate();
    double cap = 0.0;
    if (cost_cap) {
        cap = *cost_cap;
    } else {
        for (std::size_t i = 0; i < inst.site_count(); ++i) {
            double m = 0.0;
            for (std::size_t l = 0; l < inst.option_count(); ++l) {
                const auto k = inst.at(i, l);
                if (inst.feasible[k]) m = std::max(m, inst.cost[k]);
            }
            cap += m;
        }
    }
    const auto q = quantize_costs(inst, cap, opts.quantum);
    std::int64_t ceiling = 0;
    for (std::size_t i = 0; i < inst.site_count(); ++i) {
        std::int64_t m = 0;
        for (std::size_t l = 0; l < inst.option_count(); ++l) {
            const auto k = inst.at(i, l);
            if (inst.feasible[k]) m = std::max(m, q.units[k]);
        }
        ceiling += m;
    }
    const auto budget_units = std::min(q.budget_units, ceiling);
    const auto cols = columns_by_id(inst);
    const auto tables = solve_knapsack(inst, q, cols, budget_units, opts.max_table_cells);

    std::vector<FrontierPoint> out;
    double last = kNegInf;
    for (std::size_t b = 0; b <= static_cast<std::size_t>(budget_units); ++b) {
        const double v = tables.value[b];
        if (v == kNegInf || !(v > last)) continue;
        last = v;
        FrontierPoint pt;
        pt.plan = reconstruct(inst, q, cols, tables, b);
        pt.total_cost = pt.plan.total_cost;
        pt.total_index = v;
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace crids
