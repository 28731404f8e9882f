#pragma once

// Study configuration: one JSON document with scenario, inputs, column aliases,
// factor bindings, transforms, optional block diagram, options and planner settings.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crids/aggregate.hpp"
#include "crids/fuzzify.hpp"
#include "crids/geo.hpp"
#include "crids/io.hpp"
#include "crids/plan.hpp"

namespace crids {

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class PlannerMode : std::uint8_t { Threshold, Budget, Frontier };

struct PlannerConfig {
    PlannerMode mode = PlannerMode::Threshold;
    double threshold = 0.5;
    std::string threshold_column;  // site metadata column holding per-site b_i
    double budget = 0.0;
    double quantum = 1.0;
    ResilienceObjective objective = ResilienceObjective::Sum;
    std::optional<double> frontier_cap;
};

struct OptionCostSource {
    int option_id = 1;
    std::string column;  // column in the cost table
};

struct Config {
    std::filesystem::path base_dir;

    Scenario scenario;
    std::filesystem::path sites;
    std::filesystem::path elevations;
    std::filesystem::path costs;
    std::filesystem::path layers_dir;
    std::map<std::string, std::string> layer_files;  // name -> file, relative to layers_dir
    std::map<std::string, std::string> column_aliases = default_column_aliases();

    FeatureBindings bindings = FeatureBindings::defaults();
    TransformTable transforms;
    std::optional<BlockDiagram> diagram;
    std::vector<AdaptationOption> options = default_options();
    std::vector<OptionCostSource> cost_columns;
    PlannerConfig planner;
    std::vector<double> summary_thresholds{0.1, 0.5};
    double cell_size = kDefaultCellSize;
    unsigned workers = 1;

    std::string canonical;  // normalized JSON text used for the manifest hash

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    /// Explicit layer files, plus <layers_dir>/<name>.geojson for bound layers not listed.
    std::map<std::string, LayerSource> layer_sources() const;
};

/// Default transform table: VSD sigmoid (f2 = 3 ft), BFE inverse sigmoid, distance
/// factors on sigmoid curves with dataset-median references where no regulatory
/// distance exists, and flag factors (moratorium, wellfield zone) inverted.
TransformTable default_transforms();

Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// Parses "slr=<ft>" (comma-separated key=value; keys slr, ratio, depth).
void apply_scenario_override(Scenario& scenario, std::string_view text);

/// Nested ["parallel"|"series", child...] lists with factor names or codes as leaves.
BlockDiagram parse_block_diagram(std::string_view json_text);

}  // namespace crids
