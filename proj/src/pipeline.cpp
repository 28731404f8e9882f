#include "crids/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>

#include "crids/parallel.hpp"
#include "json.hpp"

namespace crids {

using nlohmann::ordered_json;

namespace {

constexpr int kDistanceDecimals = 6;
constexpr int kScoreDecimals = 9;

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Hash covers everything except timestamps, so identical runs hash identically.
std::string finish_manifest(ordered_json m, const std::string& started) {
    m["manifest_hash"] = fnv1a_hex(m.dump());
    m["started_at"] = started;
    m["finished_at"] = utc_now();
    return m.dump(2) + "\n";
}

ordered_json scenario_json(const Scenario& s) {
    return ordered_json{{"name", s.name},
                        {"sea_level_rise", s.sea_level_rise},
                        {"groundwater_response_ratio", s.groundwater_response_ratio},
                        {"groundwater_rise", s.groundwater_rise()},
                        {"drainfield_depth", s.drainfield_depth}};
}

std::string optional_fixed(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string();
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::size_t AssessmentResult::succeeded() const {
    return static_cast<std::size_t>(std::count_if(sites.begin(), sites.end(), [](const auto& s) { return s.ok(); }));
}

std::vector<std::string> report_columns() {
    std::vector<std::string> cols{"id", "x", "y", "status"};
    for (const auto& fi : registry()) cols.push_back("raw_" + std::string(fi.name));
    for (const auto& fi : registry()) cols.push_back("score_" + std::string(fi.name));
    for (const char* c : {"resistivity", "adaptability", "recovery", "index", "error"}) cols.emplace_back(c);
    return cols;
}

AssessmentResult assess(const Config& config, const std::vector<Site>& sites,
                        const std::map<std::string, FeatureLayer>& layers,
                        const std::map<std::string, ElevationSample>& samples) {
    const auto started = utc_now();
    AssessmentResult result;

    FeatureBindings bindings = config.bindings;
    for (const auto& fi : registry()) {
        auto& b = bindings.layers[index_of(fi.factor)];
        if (!b) continue;
        const bool all_present =
            std::all_of(sites.begin(), sites.end(), [&](const Site& s) { return s.raw[index_of(fi.factor)].has_value(); });
        if (all_present) b.reset();
    }

    auto extracted = extract_features(sites, layers, samples, config.scenario, bindings, config.cell_size, config.workers);
    result.warnings = std::move(extracted.warnings);

    std::vector<Site> clean;
    for (const auto& s : extracted.sites) {
        if (!extracted.site_errors.count(s.id)) clean.push_back(s);
    }
    result.transforms = config.transforms;
    result.transforms.resolve(clean);

    const auto n = extracted.sites.size();
    result.sites.resize(n);
    const BlockDiagram* diagram = config.diagram ? &*config.diagram : nullptr;
    parallel_for(n, config.workers, [&](std::size_t i) {
        auto& out = result.sites[i];
        out.site = extracted.sites[i];
        if (auto it = extracted.site_errors.find(out.site.id); it != extracted.site_errors.end()) {
            out.error = it->second;
            return;
        }
        try {
            auto mv = transform_site(out.site, result.transforms);
            aggregate(mv, diagram);
            out.membership = mv;
        } catch (const Error& e) {
            out.error = e.what();
        }
    });
    std::sort(result.sites.begin(), result.sites.end(),
              [](const SiteAssessment& a, const SiteAssessment& b) { return a.site.id < b.site.id; });

    std::string report;
    append_row(report, report_columns());
    for (const auto& sa : result.sites) {
        std::vector<std::string> row{sa.site.id, format_fixed(sa.site.point.x, kDistanceDecimals),
                                     format_fixed(sa.site.point.y, kDistanceDecimals), sa.ok() ? "ok" : "error"};
        for (const auto& fi : registry()) row.push_back(optional_fixed(sa.site.raw[index_of(fi.factor)], kDistanceDecimals));
        for (const auto& fi : registry()) {
            row.push_back(sa.ok() ? format_fixed(sa.membership->score(fi.factor), kScoreDecimals) : std::string());
        }
        if (sa.ok()) {
            const auto& m = *sa.membership;
            for (double v : {m.resistivity, m.adaptability, m.recovery, m.index}) row.push_back(format_fixed(v, kScoreDecimals));
        } else {
            row.insert(row.end(), 4, std::string());
        }
        row.push_back(sa.error);
        append_row(report, row);
    }
    result.report = std::move(report);

    result.row_counts["sites"] = sites.size();
    result.row_counts["elevations"] = samples.size();
    for (const auto& [name, layer] : layers) result.row_counts["layer:" + name] = layer.features.size();

    ordered_json refs = ordered_json::object();
    for (const auto& fi : registry()) {
        const auto& spec = result.transforms.specs[index_of(fi.factor)];
        const auto& ref = result.transforms.resolved_references[index_of(fi.factor)];
        if (spec && ref && spec->reference_mode == ReferenceMode::MedianOfDataset) refs[std::string(fi.name)] = *ref;
    }
    ordered_json rows = ordered_json::object();
    for (const auto& [k, v] : result.row_counts) rows[k] = v;
    ordered_json m{{"tool", "crids"},
                   {"version", kToolVersion},
                   {"command", "assess"},
                   {"config_hash", fnv1a_hex(config.canonical)},
                   {"scenario", scenario_json(config.scenario)},
                   {"rows", rows},
                   {"median_references", refs},
                   {"block_diagram", (config.diagram ? *config.diagram : default_block_diagram()).to_string()},
                   {"sites_assessed", result.succeeded()},
                   {"sites_failed", result.sites.size() - result.succeeded()},
                   {"warnings", result.warnings},
                   {"report_hash", fnv1a_hex(result.report)}};
    result.manifest = finish_manifest(std::move(m), started);
    return result;
}

AssessmentResult run_assess(const Config& config) {
    if (config.sites.empty()) throw ConfigError("no sites file configured");
    const auto sites = load_sites(config.resolve(config.sites), config.column_aliases);
    std::map<std::string, ElevationSample> samples;
    if (!config.elevations.empty()) samples = load_elevations(config.resolve(config.elevations));
    const auto layers = load_layers(config.layer_sources());
    return assess(config, sites, layers, samples);
}

void write_assessment(const AssessmentResult& result, const std::filesystem::path& out_dir) {
    write_text(out_dir / "report.csv", result.report);
    write_text(out_dir / "manifest.json", result.manifest);
}

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

PlanResult plan_assessment(const Config& config, const AssessmentResult& assessment,
                           const std::map<std::string, std::map<std::string, double>>& cost_table) {
    const auto started = utc_now();
    PlanResult out;

    auto options = config.options;
    for (const auto& src : config.cost_columns) {
        auto col = cost_table.find(src.column);
        if (col == cost_table.end()) throw ConfigError("cost column '" + src.column + "' not found in cost table");
        for (auto& o : options) {
            if (o.id == src.option_id) o.cost.per_site = col->second;
        }
    }

    std::vector<Site> sites;
    std::vector<MembershipVector> scores;
    std::vector<double> thresholds;
    for (const auto& sa : assessment.sites) {
        if (!sa.ok()) {
            out.errored_sites.push_back(sa.site.id);
            continue;
        }
        sites.push_back(sa.site);
        scores.push_back(*sa.membership);
        double b = config.planner.threshold;
        if (!config.planner.threshold_column.empty()) {
            auto it = sa.site.metadata.find(config.planner.threshold_column);
            if (it != sa.site.metadata.end()) {
                auto v = parse_number(it->second);
                if (!v) throw ConfigError("threshold for site " + sa.site.id + " is not a number");
                b = *v;
            }
        }
        thresholds.push_back(b);
    }
    out.instance = build_instance(sites, scores, options, thresholds);

    BudgetOptions bopts;
    bopts.quantum = config.planner.quantum;
    bopts.objective = config.planner.objective;

    ordered_json m{{"tool", "crids"},
                   {"version", kToolVersion},
                   {"command", "plan"},
                   {"config_hash", fnv1a_hex(config.canonical)},
                   {"assessment_manifest_hash", nlohmann::json::parse(assessment.manifest).value("manifest_hash", "")},
                   {"scenario", scenario_json(config.scenario)}};

    try {
        switch (config.planner.mode) {
            case PlannerMode::Threshold:
                out.plan = min_cost_assignment(out.instance);
                m["mode"] = "threshold";
                break;
            case PlannerMode::Budget:
                out.quantized = quantize_costs(out.instance, config.planner.budget, bopts.quantum);
                out.plan = max_resilience_under_budget(out.instance, config.planner.budget, bopts);
                m["mode"] = "budget";
                m["budget"] = config.planner.budget;
                m["resilience_objective"] = config.planner.objective == ResilienceObjective::Sum ? "sum" : "minimum";
                break;
            case PlannerMode::Frontier:
                out.frontier = pareto_frontier(out.instance, config.planner.frontier_cap, bopts);
                if (!out.frontier.empty()) out.plan = out.frontier.back().plan;
                m["mode"] = "frontier";
                m["frontier_points"] = out.frontier.size();
                break;
        }
    } catch (const InvalidBudget& e) {
        out.plan = Plan{};
        out.plan.sites = out.instance.sites;
        out.plan.assignment.assign(out.instance.site_count(), std::nullopt);
        out.plan.per_site_cost.assign(out.instance.site_count(), 0.0);
        out.plan.per_site_index.assign(out.instance.site_count(), 0.0);
        out.plan.status = PlanStatus::Infeasible;
        out.message = e.what();
    }
    if (config.planner.mode != PlannerMode::Threshold) m["cost_quantum"] = bopts.quantum;
    if (out.quantized) m["cost_scale_units"] = out.quantized->scale;

    // Per-site report; errored sites close the report.
    std::string report;
    append_row(report, {"id", "status", "option_id", "option_name", "cost", "index", "baseline_index", "feasible_options"});
    std::map<std::string, std::vector<std::string>> rows;
    for (std::size_t i = 0; i < out.instance.site_count(); ++i) {
        const auto& inst = out.instance;
        std::string feasible;
        for (std::size_t l = 0; l < inst.option_count(); ++l) {
            if (!inst.feasible[inst.at(i, l)]) continue;
            if (!feasible.empty()) feasible += ';';
            feasible += std::to_string(inst.options[l].id);
        }
        std::size_t nothing = 0;
        for (std::size_t l = 0; l < inst.option_count(); ++l) {
            if (inst.options[l].id == 1) nothing = l;
        }
        const auto baseline = format_fixed(inst.index[inst.at(i, nothing)], kScoreDecimals);
        const auto& choice = i < out.plan.assignment.size() ? out.plan.assignment[i] : std::nullopt;
        if (choice) {
            std::string name;
            for (const auto& o : inst.options) {
                if (o.id == *choice) name = o.name;
            }
            rows[inst.sites[i]] = {inst.sites[i], "ok", std::to_string(*choice), name,
                                   format_shortest(out.plan.per_site_cost[i]),
                                   format_fixed(out.plan.per_site_index[i], kScoreDecimals), baseline, feasible};
        } else {
            rows[inst.sites[i]] = {inst.sites[i], "infeasible", "", "", "", "", baseline, feasible};
        }
    }
    for (const auto& id : out.errored_sites) rows[id] = {id, "error", "", "", "", "", "", ""};
    for (const auto& [id, r] : rows) append_row(report, r);
    out.plan_report = std::move(report);

    if (config.planner.mode == PlannerMode::Frontier) {
        std::string fr, fp;
        append_row(fr, {"point", "total_cost", "total_index"});
        append_row(fp, {"point", "id", "option_id"});
        for (std::size_t p = 0; p < out.frontier.size(); ++p) {
            const auto& pt = out.frontier[p];
            append_row(fr, {std::to_string(p), format_shortest(pt.total_cost), format_fixed(pt.total_index, kScoreDecimals)});
            for (std::size_t i = 0; i < pt.plan.sites.size(); ++i) {
                append_row(fp, {std::to_string(p), pt.plan.sites[i],
                                pt.plan.assignment[i] ? std::to_string(*pt.plan.assignment[i]) : std::string()});
            }
        }
        out.frontier_report = std::move(fr);
        out.frontier_plans = std::move(fp);
    }

    const bool infeasible = out.plan.status == PlanStatus::Infeasible;
    if (infeasible && out.message.empty()) {
        out.message = std::to_string(out.plan.infeasible_sites.size()) + " site(s) cannot reach their threshold";
    }
    out.exit_status = infeasible ? kExitInfeasible : (out.instance.site_count() == 0 ? kExitNoSites : kExitOk);
    m["status"] = infeasible ? "infeasible" : "optimal";
    m["infeasible_sites"] = out.plan.infeasible_sites;
    m["total_cost"] = out.plan.total_cost;
    m["objective"] = out.plan.objective;
    m["report_hash"] = fnv1a_hex(out.plan_report);
    out.manifest = finish_manifest(std::move(m), started);
    return out;
}

PlanResult run_plan(const Config& config) {
    const auto assessment = run_assess(config);
    std::map<std::string, std::map<std::string, double>> costs;
    if (!config.costs.empty()) costs = load_cost_table(config.resolve(config.costs));
    return plan_assessment(config, assessment, costs);
}

void write_plan(const PlanResult& result, const std::filesystem::path& out_dir) {
    write_text(out_dir / "plan.csv", result.plan_report);
    write_text(out_dir / "plan_manifest.json", result.manifest);
    if (!result.frontier_report.empty()) {
        write_text(out_dir / "frontier.csv", result.frontier_report);
        write_text(out_dir / "frontier_plans.csv", result.frontier_plans);
    }
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

Summary summarize(std::span<const double> indices, std::span<const double> thresholds) {
    Summary s;
    s.total = indices.size();
    for (double t : thresholds) {
        ThresholdShare ts;
        ts.threshold = t;
        ts.count = static_cast<std::size_t>(std::count_if(indices.begin(), indices.end(), [t](double v) { return v < t; }));
        ts.share = s.total ? static_cast<double>(ts.count) / static_cast<double>(s.total) : 0.0;
        s.below.push_back(ts);
    }
    for (double v : indices) {
        std::size_t bin = 0;
        while (bin < 9 && v >= static_cast<double>(bin + 1) / 10.0) ++bin;
        ++s.histogram[bin];
    }
    return s;
}

Summary summarize_report(const CsvTable& report, std::span<const double> thresholds) {
    const auto idx = report.column("index");
    const auto status = report.column("status");
    if (!idx) throw ParseError(report.source, 1, "report has no index column");
    std::vector<double> values;
    for (const auto& row : report.rows) {
        if (status && row.fields[*status] != "ok") continue;
        auto v = parse_number(row.fields[*idx]);
        if (!v) throw ParseError(report.source, row.line, "index is not a number");
        values.push_back(*v);
    }
    return summarize(values, thresholds);
}

std::string Summary::text() const {
    std::string out = "sites: " + std::to_string(total) + "\n";
    char buf[128];
    for (const auto& b : below) {
        std::snprintf(buf, sizeof buf, "below %s: %zu (%.1f%%)\n", format_shortest(b.threshold).c_str(), b.count,
                      100.0 * b.share);
        out += buf;
    }
    out += "histogram:\n";
    const std::size_t peak = *std::max_element(histogram.begin(), histogram.end());
    constexpr std::size_t kBarWidth = 40;
    for (std::size_t i = 0; i < histogram.size(); ++i) {
        const std::size_t len = peak ? (histogram[i] * kBarWidth + peak - 1) / peak : 0;
        std::snprintf(buf, sizeof buf, "[%.1f,%.1f%c |%-40s| %zu\n", static_cast<double>(i) / 10.0,
                      static_cast<double>(i + 1) / 10.0, i == 9 ? ']' : ')', std::string(len, '#').c_str(), histogram[i]);
        out += buf;
    }
    return out;
}

}  // namespace crids
