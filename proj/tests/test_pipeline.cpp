#include "doctest.h"

#include <filesystem>

#include "crids/pipeline.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "table1.hpp"

using namespace crids;

namespace {

const std::filesystem::path kData = CRIDS_TEST_DATA;

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("crids_test_pipeline_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

const SiteAssessment& find(const AssessmentResult& r, const std::string& id) {
    for (const auto& s : r.sites) {
        if (s.site.id == id) return s;
    }
    throw std::runtime_error("no site " + id);
}

std::string body_without_timestamps(const std::string& manifest) {
    auto j = nlohmann::json::parse(manifest);
    j.erase("started_at");
    j.erase("finished_at");
    return j.dump();
}

}  // namespace

TEST_CASE("report columns are fixed") {
    const auto cols = report_columns();
    REQUIRE(cols.size() == 4 + 2 * kFactorCount + 5);
    CHECK(cols[0] == "id");
    CHECK(cols[4] == "raw_capacity_redundancy");
    CHECK(cols[4 + kFactorCount] == "score_capacity_redundancy");
    CHECK(cols[cols.size() - 2] == "index");
    CHECK(cols.back() == "error");
}

TEST_CASE("published scores through the passthrough configuration") {
    const auto cfg = load_config(kData / "table1_scores.json");
    const auto r = run_assess(cfg);
    REQUIRE(r.succeeded() == 3);
    for (const auto& row : table1::rows()) {
        CAPTURE(row.id);
        const auto& m = *find(r, row.id).membership;
        CHECK(std::abs(m.index - row.index) < 1e-3);
        CHECK(std::abs(m.resistivity - row.resistivity) < 1e-3);
        CHECK(std::abs(m.recovery - row.recovery) < 1e-3);
        CHECK(std::abs(m.score(Factor::A4) - row.gw_contamination) < 1e-3);
    }
    CHECK(r.exit_status() == kExitOk);
}

TEST_CASE("assessment report matches the golden file") {
    const auto cfg = load_config(kData / "table1_scores.json");
    const auto r = run_assess(cfg);
    CHECK(r.report == read_text(kData / "table1_report.csv"));
}

TEST_CASE("neutral site and submerged drainfield") {
    auto cfg = parse_config("{}");
    std::vector<Site> sites{{"ones", {0, 0}, {}, {}}, {"wet", {0, 0}, {}, {}}};
    for (const auto& fi : registry()) cfg.bindings.layers[index_of(fi.factor)].reset();
    std::map<std::string, ElevationSample> samples{{"ones", {"ones", 100, 0}}, {"wet", {"wet", 5, 3}}};
    cfg.scenario.sea_level_rise = 0.7;
    cfg.scenario.groundwater_response_ratio = 1.0;
    cfg.transforms = TransformTable{};
    FactorTransformSpec vsd;
    vsd.kind = TransformKind::Sigmoid;
    vsd.shape = 5;
    vsd.reference = 3;
    cfg.transforms.set(Factor::R3, vsd);
    const auto r = assess(cfg, sites, {}, samples);
    REQUIRE(r.succeeded() == 2);
    const auto& ones = *find(r, "ones").membership;
    CHECK(ones.index == doctest::Approx(1.0).epsilon(1e-9));
    const auto& wet = find(r, "wet");
    CHECK(wet.site.value(Factor::R3) == doctest::Approx(-1.7));
    CHECK(wet.membership->score(Factor::R3) == 0.0);
    CHECK(wet.membership->resistivity == 0.0);
    CHECK(wet.membership->index == 0.0);
}

TEST_CASE("every input site appears once, errored or not") {
    auto cfg = load_config(kData / "mini" / "study.json");
    auto sites = load_sites(cfg.resolve(cfg.sites));
    sites.push_back(Site{"M0", {10, 10}, {}, {}});  // no elevation sample
    Site bad{"M9", {10, 10}, {}, {}};
    bad.raw[index_of(Factor::A8)] = 1.7;  // passthrough outside [0, 1]
    sites.push_back(bad);
    auto samples = load_elevations(cfg.resolve(cfg.elevations));
    samples["M9"] = {"M9", 20, 2};
    const auto r = assess(cfg, sites, load_layers(cfg.layer_sources()), samples);
    REQUIRE(r.sites.size() == 5);
    CHECK(r.succeeded() == 3);
    CHECK(r.sites[0].site.id == "M0");
    CHECK_FALSE(r.sites[0].ok());
    CHECK(r.sites[0].error.find("elevation") != std::string::npos);
    CHECK(find(r, "M9").error.find("land_use") != std::string::npos);
    const auto table = parse_csv(r.report);
    REQUIRE(table.rows.size() == 5);
    CHECK(table.rows[0].fields[3] == "error");

    const auto manifest = nlohmann::json::parse(r.manifest);
    CHECK(manifest["sites_failed"] == 2);
    CHECK(manifest["rows"]["layer:sewer"] == 1);
}

TEST_CASE("zero successful sites gives the no-sites status") {
    auto cfg = parse_config("{}");
    std::vector<Site> sites{{"a", {0, 0}, {}, {}}};
    for (auto& b : cfg.bindings.layers) b.reset();
    const auto r = assess(cfg, sites, {}, {});
    CHECK(r.succeeded() == 0);
    CHECK(r.exit_status() == kExitNoSites);
}

TEST_CASE("repeated runs are byte-identical") {
    auto cfg = load_config(kData / "mini" / "study.json");
    const auto a = run_assess(cfg);
    cfg.workers = 4;
    const auto b = run_assess(cfg);
    CHECK(a.report == b.report);
    CHECK(body_without_timestamps(a.manifest).size() > 0);
    const auto ja = nlohmann::json::parse(a.manifest), jb = nlohmann::json::parse(b.manifest);
    CHECK(ja["manifest_hash"] == jb["manifest_hash"]);
    CHECK(ja["report_hash"] == fnv1a_hex(a.report));
}

TEST_CASE("manifest records medians and scenario") {
    auto cfg = load_config(kData / "mini" / "study.json");
    apply_scenario_override(cfg.scenario, "slr=1.837");
    const auto r = run_assess(cfg);
    const auto m = nlohmann::json::parse(r.manifest);
    CHECK(m["scenario"]["sea_level_rise"] == 1.837);
    CHECK(m["median_references"].contains("canal_distance") == false);
    CHECK(m["version"] == kToolVersion);
    const auto vsd = find(r, "M1").site.value(Factor::R3);
    CHECK(*vsd == doctest::Approx(7.0 - 1.837 * 0.345));
}

TEST_CASE("threshold plan picks the cheapest qualifying option per site") {
    const auto cfg = load_config(kData / "mini" / "study.json");
    const auto assessment = run_assess(cfg);
    const auto costs = load_cost_table(cfg.resolve(cfg.costs));
    const auto result = plan_assessment(cfg, assessment, costs);
    REQUIRE(result.exit_status == kExitOk);

    // Oracle: score every option per site and enumerate.
    for (std::size_t i = 0; i < assessment.sites.size(); ++i) {
        const auto& sa = assessment.sites[i];
        const double b = *parse_number(sa.site.metadata.at("min_index"));
        std::optional<std::pair<double, int>> best;
        for (const auto& o : cfg.options) {
            if (o.kind != OptionKind::DoNothing && !o.feasible_for(sa.site)) continue;
            const double cost = o.id == 3 ? costs.at("mound_cost").at(sa.site.id) : o.cost.flat;
            if (post_adaptation_cri(sa.membership->scores, o) < b) continue;
            if (!best || cost < best->first) best = {cost, o.id};
        }
        REQUIRE(best.has_value());
        CAPTURE(sa.site.id);
        CHECK(result.plan.assignment[i] == best->second);
    }
    CHECK(result.plan.assignment == std::vector<std::optional<int>>{1, 5, 3});
    CHECK(result.plan.total_cost == 84000);
}

TEST_CASE("budget mode with zero budget keeps every site as is") {
    auto cfg = load_config(kData / "mini" / "study.json");
    cfg.planner.mode = PlannerMode::Budget;
    cfg.planner.budget = 0;
    const auto r = plan_assessment(cfg, run_assess(cfg), load_cost_table(cfg.resolve(cfg.costs)));
    CHECK(r.exit_status == kExitOk);
    for (const auto& a : r.plan.assignment) CHECK(a == 1);
    CHECK(r.plan.total_cost == 0);
}

TEST_CASE("infeasible threshold reports every site and exits with the planner status") {
    auto cfg = load_config(kData / "mini" / "study.json");
    cfg.planner.threshold_column.clear();
    cfg.planner.threshold = 0.999;
    const auto r = plan_assessment(cfg, run_assess(cfg), load_cost_table(cfg.resolve(cfg.costs)));
    CHECK(r.exit_status == kExitInfeasible);
    CHECK(r.plan.infeasible_sites == std::vector<std::string>{"M2"});
    CHECK(r.plan_report.find("M2,infeasible") != std::string::npos);
}

TEST_CASE("frontier mode matches brute force on two sites and three options") {
    auto cfg = load_config(kData / "mini" / "study.json");
    cfg.planner.mode = PlannerMode::Frontier;
    cfg.options.resize(3);
    auto assessment = run_assess(cfg);
    assessment.sites.pop_back();
    const auto r = plan_assessment(cfg, assessment, load_cost_table(cfg.resolve(cfg.costs)));
    REQUIRE(r.instance.site_count() == 2);
    const auto want = oracle::brute_frontier(r.instance);
    REQUIRE(r.frontier.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
        CHECK(r.frontier[k].total_cost == want[k].first);
        CHECK(r.frontier[k].total_index == doctest::Approx(want[k].second).epsilon(1e-12));
    }
    CHECK(parse_csv(r.frontier_report).rows.size() == want.size());
}

TEST_CASE("write outputs") {
    const auto dir = scratch("out");
    const auto cfg = load_config(kData / "mini" / "study.json");
    const auto r = run_assess(cfg);
    write_assessment(r, dir);
    CHECK(read_text(dir / "report.csv") == r.report);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    write_plan(run_plan(cfg), dir);
    CHECK(std::filesystem::exists(dir / "plan.csv"));
}

TEST_CASE("summaries") {
    const std::vector<double> v{0.05, 0.45, 0.95};
    const auto s = summarize(v);
    REQUIRE(s.below.size() == 2);
    CHECK(s.below[0].count == 1);
    CHECK(s.below[1].count == 2);
    CHECK(s.text().find("below 0.1: 1 (33.3%)") != std::string::npos);
    CHECK(s.text().find("below 0.5: 2 (66.7%)") != std::string::npos);
    CHECK(s.histogram[0] == 1);
    CHECK(s.histogram[4] == 1);
    CHECK(s.histogram[9] == 1);

    const auto empty = summarize(std::vector<double>{});
    CHECK(empty.total == 0);
    CHECK(empty.below[0].count == 0);
    CHECK(empty.below[1].share == 0.0);
    CHECK_NOTHROW(empty.text());

    const std::vector<double> edges{0.0, 0.1, 0.5, 1.0};
    const auto e = summarize(edges);
    CHECK(e.below[0].count == 1);
    CHECK(e.histogram[1] == 1);
    CHECK(e.histogram[9] == 1);

    const auto table = parse_csv("id,status,index\na,ok,0.05\nb,error,\nc,ok,0.7\n");
    const auto fromfile = summarize_report(table);
    CHECK(fromfile.total == 2);
    CHECK(fromfile.below[0].count == 1);
}

TEST_CASE("fnv1a digest") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
