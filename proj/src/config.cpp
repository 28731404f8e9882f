#include "crids/config.hpp"

#include <set>

#include "json.hpp"

namespace crids {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

double number_at(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

Factor factor_named(const std::string& text, const std::string& where) {
    auto f = parse_factor(text);
    if (!f) throw ConfigError(where + ": unknown factor '" + text + "'");
    return *f;
}

FactorTransformSpec sigmoid(TransformKind kind, double shape, std::optional<double> reference) {
    FactorTransformSpec s;
    s.kind = kind;
    s.shape = shape;
    if (reference) {
        s.reference = *reference;
    } else {
        s.reference_mode = ReferenceMode::MedianOfDataset;
    }
    return s;
}

FactorTransformSpec grade(TransformKind kind, double lo, double hi) {
    FactorTransformSpec s;
    s.kind = kind;
    s.x_min = lo;
    s.x_max = hi;
    return s;
}

FactorTransformSpec parse_transform(const json& j, const std::string& where) {
    check_keys(j, where, {"function", "f1", "f2", "x_min", "x_max"});
    const auto fname = j.at("function").get<std::string>();
    auto kind = parse_transform_kind(fname);
    if (!kind) throw ConfigError(where + ": unknown function '" + fname + "'");
    FactorTransformSpec s;
    s.kind = *kind;
    switch (*kind) {
        case TransformKind::Sigmoid:
        case TransformKind::InverseSigmoid: {
            s.shape = number_at(j, "f1", where);
            const auto& ref = j.at("f2");
            if (ref.is_string() && ref.get<std::string>() == "median") {
                s.reference_mode = ReferenceMode::MedianOfDataset;
            } else {
                s.reference = number_at(j, "f2", where);
            }
            break;
        }
        case TransformKind::Grade:
        case TransformKind::InverseGrade:
            s.x_min = number_at(j, "x_min", where);
            s.x_max = number_at(j, "x_max", where);
            break;
        case TransformKind::Passthrough:
            break;
    }
    try {
        s.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return s;
}

BlockNode parse_block(const json& j, const std::string& where) {
    if (j.is_string()) return BlockNode::make_leaf(factor_named(j.get<std::string>(), where));
    if (!j.is_array() || j.empty() || !j[0].is_string()) {
        throw ConfigError(where + ": block must be a factor name or [\"series\"|\"parallel\", ...]");
    }
    const auto op = j[0].get<std::string>();
    std::vector<BlockNode> children;
    for (std::size_t i = 1; i < j.size(); ++i) children.push_back(parse_block(j[i], where));
    if (children.empty()) throw ConfigError(where + ": empty " + op + " block");
    if (op == "series") return BlockNode::series(std::move(children));
    if (op == "parallel") return BlockNode::parallel(std::move(children));
    throw ConfigError(where + ": unknown block type '" + op + "'");
}

AdaptationOption parse_option(const json& j, std::size_t n, std::vector<OptionCostSource>& cost_columns) {
    const std::string where = "options[" + std::to_string(n) + "]";
    check_keys(j, where, {"id", "kind", "name", "cost", "cost_column", "mask", "formula", "exclude_if"});
    AdaptationOption o;
    if (j.contains("kind")) {
        const auto text = j["kind"].get<std::string>();
        auto kind = parse_option_kind(text);
        if (!kind) throw ConfigError(where + ": unknown option kind '" + text + "'");
        for (const auto& d : default_options()) {
            if (d.kind == *kind) o = d;
        }
    } else if (!j.contains("formula")) {
        throw ConfigError(where + ": needs a kind or a formula");
    }
    if (j.contains("id")) o.id = j["id"].get<int>();
    if (j.contains("name")) o.name = j["name"].get<std::string>();
    if (o.name.empty()) o.name = "option" + std::to_string(o.id);
    if (j.contains("cost")) o.cost.flat = number_at(j, "cost", where);
    if (o.cost.flat < 0.0) throw ConfigError(where + ": cost must be >= 0");
    if (j.contains("cost_column")) cost_columns.push_back({o.id, j["cost_column"].get<std::string>()});
    if (j.contains("mask")) {
        o.masked.clear();
        for (const auto& m : j["mask"]) o.masked.insert(factor_named(m.get<std::string>(), where + ".mask"));
    }
    if (j.contains("formula")) {
        const auto text = j["formula"].get<std::string>();
        auto f = parse_index_formula(text);
        if (!f) throw ConfigError(where + ": unknown formula '" + text + "'");
        o.formula = *f;
    }
    if (j.contains("exclude_if")) {
        o.exclusions.clear();
        for (const auto& r : j["exclude_if"]) {
            check_keys(r, where + ".exclude_if", {"factor", "op", "value"});
            auto op = parse_comparison(r.at("op").get<std::string>());
            if (!op) throw ConfigError(where + ": unknown comparison");
            o.exclusions.push_back({factor_named(r.at("factor").get<std::string>(), where),
                                    *op, number_at(r, "value", where)});
        }
    }
    return o;
}

}  // namespace

TransformTable default_transforms() {
    TransformTable t;
    const auto S = TransformKind::Sigmoid;
    const auto IS = TransformKind::InverseSigmoid;
    const auto IG = TransformKind::InverseGrade;
    t.set(Factor::R1, FactorTransformSpec{});
    t.set(Factor::R2, sigmoid(IS, 0.5, 2.0));
    t.set(Factor::R3, sigmoid(S, 5.0, 3.0));
    t.set(Factor::A1, sigmoid(S, 3.0, 100.0));
    t.set(Factor::A2, grade(IG, 0.0, 1.0));
    t.set(Factor::A3, sigmoid(S, 5.0, 200.0));
    t.set(Factor::A5, grade(IG, 0.0, 50.0));
    t.set(Factor::A6, sigmoid(S, 3.0, std::nullopt));
    t.set(Factor::A7, sigmoid(S, 4.0, std::nullopt));
    t.set(Factor::A8, FactorTransformSpec{});
    t.set(Factor::Re1, sigmoid(IS, 0.7, std::nullopt));
    t.set(Factor::Re2, sigmoid(S, 2.0, std::nullopt));
    t.set(Factor::Re3, sigmoid(S, 1.5, std::nullopt));
    t.set(Factor::Re4, grade(IG, 0.0, 1.0));
    return t;
}

std::filesystem::path Config::resolve(const std::filesystem::path& p) const {
    if (p.empty() || p.is_absolute()) return p;
    return base_dir / p;
}

std::map<std::string, LayerSource> Config::layer_sources() const {
    std::map<std::string, std::optional<LayerKind>> expected;
    for (const auto& b : bindings.layers) {
        if (!b) continue;
        auto& slot = expected[b->layer];
        if (b->measure != Measure::Distance) slot = LayerKind::Polygons;
    }
    std::map<std::string, LayerSource> out;
    const auto dir = resolve(layers_dir);
    for (const auto& [name, file] : layer_files) {
        std::filesystem::path p = file;
        if (!p.is_absolute()) p = dir.empty() ? resolve(p) : dir / p;
        auto it = expected.find(name);
        out[name] = LayerSource{p, it == expected.end() ? std::nullopt : it->second};
    }
    // Bound layers without an explicit file are picked up as <layers_dir>/<name>.geojson.
    if (!layers_dir.empty()) {
        for (const auto& [name, kind] : expected) {
            if (out.count(name)) continue;
            auto p = dir / (name + ".geojson");
            if (std::filesystem::exists(p)) out[name] = LayerSource{p, kind};
        }
    }
    return out;
}

Config parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Config cfg;
    cfg.base_dir = base_dir;
    cfg.transforms = default_transforms();
    try {
        check_keys(doc, "config", {"scenario", "inputs", "columns", "bindings", "vertical_separation_from_elevation",
                                   "transforms", "block_diagram", "options", "planner", "summary", "grid", "workers"});

        if (doc.contains("scenario")) {
            const auto& s = doc["scenario"];
            check_keys(s, "scenario", {"name", "sea_level_rise", "groundwater_response_ratio", "drainfield_depth"});
            if (s.contains("name")) cfg.scenario.name = s["name"].get<std::string>();
            if (s.contains("sea_level_rise")) cfg.scenario.sea_level_rise = number_at(s, "sea_level_rise", "scenario");
            if (s.contains("groundwater_response_ratio")) {
                cfg.scenario.groundwater_response_ratio = number_at(s, "groundwater_response_ratio", "scenario");
            }
            if (s.contains("drainfield_depth")) cfg.scenario.drainfield_depth = number_at(s, "drainfield_depth", "scenario");
        }

        if (doc.contains("inputs")) {
            const auto& in = doc["inputs"];
            check_keys(in, "inputs", {"sites", "elevations", "costs", "layers_dir", "layers"});
            if (in.contains("sites")) cfg.sites = in["sites"].get<std::string>();
            if (in.contains("elevations")) cfg.elevations = in["elevations"].get<std::string>();
            if (in.contains("costs")) cfg.costs = in["costs"].get<std::string>();
            if (in.contains("layers_dir")) cfg.layers_dir = in["layers_dir"].get<std::string>();
            if (in.contains("layers")) {
                for (const auto& [name, file] : in["layers"].items()) cfg.layer_files[name] = file.get<std::string>();
            }
        }

        if (doc.contains("columns")) {
            for (const auto& [alias, canonical] : doc["columns"].items()) {
                cfg.column_aliases[alias] = canonical.get<std::string>();
            }
        }

        if (doc.contains("bindings")) {
            for (const auto& [name, b] : doc["bindings"].items()) {
                const Factor f = factor_named(name, "bindings");
                if (b.is_null()) {
                    cfg.bindings.layers[index_of(f)].reset();
                    continue;
                }
                check_keys(b, "bindings." + name, {"layer", "measure", "attribute", "outside_value"});
                LayerBinding lb;
                lb.layer = b.at("layer").get<std::string>();
                if (b.contains("measure")) {
                    auto m = parse_measure(b["measure"].get<std::string>());
                    if (!m) throw ConfigError("bindings." + name + ": unknown measure");
                    lb.measure = *m;
                }
                if (b.contains("attribute")) lb.attribute = b["attribute"].get<std::string>();
                if (b.contains("outside_value")) lb.outside_value = number_at(b, "outside_value", "bindings." + name);
                if (lb.measure == Measure::AttributeIfInside && lb.attribute.empty()) {
                    throw ConfigError("bindings." + name + ": attribute_if_inside needs an attribute");
                }
                cfg.bindings.bind(f, std::move(lb));
            }
        }
        if (doc.contains("vertical_separation_from_elevation")) {
            cfg.bindings.vertical_separation_from_elevation = doc["vertical_separation_from_elevation"].get<bool>();
        }

        if (doc.contains("transforms")) {
            for (const auto& [name, t] : doc["transforms"].items()) {
                const Factor f = factor_named(name, "transforms");
                if (t.is_null()) {
                    cfg.transforms.specs[index_of(f)].reset();
                } else {
                    cfg.transforms.set(f, parse_transform(t, "transforms." + name));
                }
            }
        }

        if (doc.contains("block_diagram") && !doc["block_diagram"].is_null()) {
            cfg.diagram = parse_block(doc["block_diagram"], "block_diagram");
        }

        if (doc.contains("options")) {
            cfg.options.clear();
            std::set<int> ids;
            for (std::size_t i = 0; i < doc["options"].size(); ++i) {
                auto o = parse_option(doc["options"][i], i, cfg.cost_columns);
                if (!ids.insert(o.id).second) throw ConfigError("duplicate option id " + std::to_string(o.id));
                cfg.options.push_back(std::move(o));
            }
            if (!ids.count(1)) throw ConfigError("options must include the do-nothing option (id 1)");
        }

        if (doc.contains("planner")) {
            const auto& p = doc["planner"];
            check_keys(p, "planner", {"mode", "threshold", "threshold_column", "budget", "quantum", "objective",
                                      "frontier_cap"});
            if (p.contains("mode")) {
                const auto m = p["mode"].get<std::string>();
                if (m == "threshold") {
                    cfg.planner.mode = PlannerMode::Threshold;
                } else if (m == "budget") {
                    cfg.planner.mode = PlannerMode::Budget;
                } else if (m == "frontier") {
                    cfg.planner.mode = PlannerMode::Frontier;
                } else {
                    throw ConfigError("planner.mode must be threshold, budget or frontier");
                }
            }
            if (p.contains("threshold")) cfg.planner.threshold = number_at(p, "threshold", "planner");
            if (p.contains("threshold_column")) cfg.planner.threshold_column = p["threshold_column"].get<std::string>();
            if (p.contains("budget")) cfg.planner.budget = number_at(p, "budget", "planner");
            if (p.contains("quantum")) cfg.planner.quantum = number_at(p, "quantum", "planner");
            if (p.contains("objective")) {
                const auto o = p["objective"].get<std::string>();
                if (o == "sum") {
                    cfg.planner.objective = ResilienceObjective::Sum;
                } else if (o == "minimum") {
                    cfg.planner.objective = ResilienceObjective::Minimum;
                } else {
                    throw ConfigError("planner.objective must be sum or minimum");
                }
            }
            if (p.contains("frontier_cap") && !p["frontier_cap"].is_null()) {
                cfg.planner.frontier_cap = number_at(p, "frontier_cap", "planner");
            }
            if (!(cfg.planner.quantum > 0.0)) throw ConfigError("planner.quantum must be > 0");
        }

        if (doc.contains("summary")) {
            check_keys(doc["summary"], "summary", {"thresholds"});
            cfg.summary_thresholds = doc["summary"].at("thresholds").get<std::vector<double>>();
        }
        if (doc.contains("grid")) {
            check_keys(doc["grid"], "grid", {"cell_size"});
            cfg.cell_size = number_at(doc["grid"], "cell_size", "grid");
            if (!(cfg.cell_size > 0.0)) throw ConfigError("grid.cell_size must be > 0");
        }
        if (doc.contains("workers")) cfg.workers = std::max(1, doc["workers"].get<int>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        cfg.scenario.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.canonical = doc.dump();
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    return parse_config(read_text(path), path.parent_path());
}

void apply_scenario_override(Scenario& scenario, std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto item = text.substr(pos, end - pos);
        pos = end + 1;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("scenario override must be key=value");
        const auto key = item.substr(0, eq);
        const auto value = parse_number(item.substr(eq + 1));
        if (!value) throw ConfigError("scenario override value is not a number");
        if (key == "slr") {
            scenario.sea_level_rise = *value;
        } else if (key == "ratio") {
            scenario.groundwater_response_ratio = *value;
        } else if (key == "depth") {
            scenario.drainfield_depth = *value;
        } else {
            throw ConfigError("unknown scenario override key '" + std::string(key) + "'");
        }
    }
    try {
        scenario.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("scenario override: ") + e.what());
    }
}

BlockDiagram parse_block_diagram(std::string_view json_text) {
    try {
        return parse_block(json::parse(json_text), "block_diagram");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("block_diagram: ") + e.what());
    }
}

}  // namespace crids
