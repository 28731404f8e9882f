#include "doctest.h"

#include <filesystem>
#include <random>

#include "crids/config.hpp"
#include "crids/io.hpp"

using namespace crids;

namespace {

const std::filesystem::path kData = CRIDS_TEST_DATA;

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("crids_test_io_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("csv parsing") {
    const auto t = parse_csv("\xEF\xBB\xBFid,name\r\n1,\"a, b\"\n2,\"say \"\"hi\"\"\"\n\n", "t.csv");
    REQUIRE(t.header == std::vector<std::string>{"id", "name"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].fields[1] == "a, b");
    CHECK(t.rows[1].fields[1] == "say \"hi\"");
    CHECK(t.rows[1].line == 3);
    CHECK(t.column("name") == 1u);

    try {
        parse_csv("a,b\n1,2\n3\n", "bad.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_csv("a\n\"open\n", "q.csv"), ParseError);
}

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng);
        CHECK(parse_number(format_shortest(v)) == v);
    }
    CHECK(format_fixed(-0.0000001, 6) == "0.000000");
    CHECK(format_fixed(20.1515, 6) == "20.151500");
    CHECK_FALSE(parse_number("1.5x").has_value());
    CHECK_FALSE(parse_number("").has_value());
    CHECK_FALSE(parse_number("inf").has_value());
    CHECK(parse_number(" 2.5 ") == 2.5);
    CHECK(csv_escape("a,b") == "\"a,b\"");
}

TEST_CASE("load_sites reads the published raw columns") {
    const auto sites = load_sites(kData / "table1_raw.csv");
    REQUIRE(sites.size() == 3);
    CHECK(sites[0].id == "AP497567");
    CHECK(sites[0].value(Factor::R3) == 20.1515);
    CHECK(sites[0].value(Factor::A3) == 867.3902);
    CHECK(sites[0].value(Factor::R2) == 0.0);
    CHECK(sites[2].value(Factor::R2) == 9.0);
    CHECK(sites[1].value(Factor::Re3) == 1396.808);
    CHECK_FALSE(sites[0].value(Factor::Re2).has_value());
}

TEST_CASE("load_sites edge cases") {
    CHECK(parse_sites(parse_csv("id,x,y\n")).empty());
    CHECK_THROWS_AS(parse_sites(parse_csv("APNO,x,y\nA,1,2\nA,3,4\n")), DuplicateId);
    try {
        parse_sites(parse_csv("id,x,y\nA,1,2\nA,3,4\n"));
    } catch (const DuplicateId& e) {
        CHECK(e.id == "A");
    }
    CHECK_THROWS_AS(parse_sites(parse_csv("id,x\nA,1\n")), ParseError);
    CHECK_THROWS_AS(parse_sites(parse_csv("id,x,y\nA,1,oops\n")), ParseError);

    const auto s = parse_sites(parse_csv("id,x,y,zone,sewer_distance,R3\nA,1,2,north,,4.5\n"));
    CHECK(s[0].metadata.at("zone") == "north");
    CHECK_FALSE(s[0].value(Factor::Re1).has_value());
    CHECK(s[0].value(Factor::R3) == 4.5);
}

TEST_CASE("sites round-trip through the file format") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1e5);
    std::vector<Site> sites;
    for (int i = 0; i < 50; ++i) {
        Site s{"S" + std::to_string(i), {u(rng), u(rng)}, {}, {{"note", i % 2 ? "a,b" : "plain"}}};
        for (const auto& fi : registry()) {
            if ((i + fi.ordinal) % 3 && fi.factor != Factor::A4) s.raw[index_of(fi.factor)] = u(rng) / 7.0;
        }
        sites.push_back(s);
    }
    const auto back = parse_sites(parse_csv(write_sites(sites)));
    CHECK(back == sites);
}

TEST_CASE("elevations and cost tables") {
    const auto e = load_elevations(kData / "mini" / "elevations.csv");
    CHECK(e.at("M2").ground_elevation == 6.5);
    CHECK(e.at("M2").groundwater_elevation == 3.0);
    const auto c = load_cost_table(kData / "mini" / "costs.csv");
    CHECK(c.at("mound_cost").at("M3") == 39000);
    CHECK_THROWS_AS(load_elevations(kData / "missing.csv"), IoError);
}

TEST_CASE("geojson layers") {
    const auto sewer = parse_geojson(read_text(kData / "mini" / "layers" / "sewer.geojson"), "sewer");
    CHECK(sewer.kind == LayerKind::Polylines);
    REQUIRE(sewer.features.size() == 1);
    CHECK(std::get<std::string>(sewer.features[0].attributes.at("name")) == "main");

    const auto flood = parse_geojson(read_text(kData / "mini" / "layers" / "flood_zones.geojson"), "flood");
    CHECK(flood.kind == LayerKind::Polygons);
    REQUIRE(flood.features[0].polygons.size() == 1);
    CHECK(flood.features[0].polygons[0].holes.size() == 1);
    CHECK(flood.features[0].number("BFE") == 9.0);

    const auto wells = read_text(kData / "mini" / "layers" / "wellheads.geojson");
    CHECK_THROWS_AS(parse_geojson(wells, "wells", LayerKind::Polylines), KindMismatch);

    const std::string bad = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[1,2]}},
        {"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":["x",2]}}]})";
    try {
        parse_geojson(bad, "bad");
        FAIL("expected a geometry error");
    } catch (const GeometryError& e) {
        CHECK(e.feature == 1);
    }
    const std::string mixed = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[1,2]}},
        {"type":"Feature","properties":{},"geometry":{"type":"LineString","coordinates":[[1,2],[3,4]]}}]})";
    CHECK_THROWS_AS(parse_geojson(mixed, "mixed"), KindMismatch);
}

TEST_CASE("geojson round-trip") {
    const auto flood = parse_geojson(read_text(kData / "mini" / "layers" / "flood_zones.geojson"), "flood_zones");
    const auto back = parse_geojson(to_geojson(flood), "flood_zones");
    REQUIRE(back.features.size() == 1);
    CHECK(back.features[0].polygons[0].outer == flood.features[0].polygons[0].outer);
    CHECK(back.features[0].polygons[0].holes == flood.features[0].polygons[0].holes);
    CHECK(back.features[0].number("BFE") == 9.0);
}

TEST_CASE("config parsing") {
    const auto cfg = load_config(kData / "mini" / "study.json");
    CHECK(cfg.base_dir == kData / "mini");
    CHECK(cfg.resolve(cfg.sites) == kData / "mini" / "sites.csv");
    CHECK(cfg.options.size() == 5);
    CHECK(cfg.options[1].cost.flat == 60000);
    REQUIRE(cfg.cost_columns.size() == 1);
    CHECK(cfg.cost_columns[0].option_id == 3);
    CHECK(cfg.planner.threshold_column == "min_index");
    CHECK_FALSE(cfg.bindings.layers[index_of(Factor::A1)].has_value());
    CHECK(cfg.transforms.spec(Factor::Re1)->reference == 1500);

    const auto sources = cfg.layer_sources();
    CHECK(sources.count("sewer") == 1);
    CHECK(sources.at("flood_zones").expected_kind == LayerKind::Polygons);
    CHECK(sources.count("wetlands") == 0);
}

TEST_CASE("shipped example config parses") {
    const auto cfg = load_config(kData.parent_path().parent_path() / "config" / "example.json");
    CHECK(cfg.scenario.groundwater_rise() == doctest::Approx(1.837 * 0.345));
    CHECK(cfg.layer_sources().at("flood_zones").path.filename() == "fema_flood_zones.geojson");
    CHECK(cfg.column_aliases.at("APNO") == "id");
    CHECK(cfg.planner.mode == PlannerMode::Budget);
    CHECK(cfg.planner.quantum == 1000);
    CHECK(cfg.cell_size == 500);
    REQUIRE(cfg.options.size() == 5);
    CHECK(cfg.options[2].formula == IndexFormula::Mound);
    CHECK(cfg.options[2].masked.count(Factor::A4) == 1);
    CHECK(cfg.options[1].exclusions.size() == 1);
    REQUIRE(cfg.cost_columns.size() == 1);
    CHECK(cfg.cost_columns[0].column == "sewer_cost");
    CHECK(cfg.transforms.spec(Factor::A6)->reference_mode == ReferenceMode::MedianOfDataset);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config(R"({"scenaro": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"transforms": {"vsd": {"function": "sigmoid"}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"transforms": {"R3": {"function": "sigmoid", "f1": -1, "f2": 3}}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"options": [{"kind": "MoundSystem"}]})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_NOTHROW(parse_config("{}"));

    const auto med = parse_config(R"({"transforms": {"Re1": {"function": "inverse_sigmoid", "f1": 1, "f2": "median"}}})");
    CHECK(med.transforms.spec(Factor::Re1)->reference_mode == ReferenceMode::MedianOfDataset);
    const auto removed = parse_config(R"({"transforms": {"A8": null}})");
    CHECK_FALSE(removed.transforms.spec(Factor::A8).has_value());
}

TEST_CASE("config hash input is canonical") {
    const auto a = parse_config(R"({"scenario": {"sea_level_rise": 1, "name": "x"}})");
    const auto b = parse_config("{ \"scenario\" : { \"name\":\"x\",\"sea_level_rise\":1 } }");
    CHECK(a.canonical == b.canonical);
}

TEST_CASE("scenario override") {
    Scenario s;
    apply_scenario_override(s, "slr=1.837");
    CHECK(s.sea_level_rise == 1.837);
    apply_scenario_override(s, "slr=2,ratio=0.31,depth=2.5");
    CHECK(s.groundwater_response_ratio == 0.31);
    CHECK(s.drainfield_depth == 2.5);
    CHECK_THROWS_AS(apply_scenario_override(s, "tide=1"), ConfigError);
    CHECK_THROWS_AS(apply_scenario_override(s, "slr=-1"), ConfigError);
    CHECK_THROWS_AS(apply_scenario_override(s, "slr"), ConfigError);
}

TEST_CASE("block diagrams from configuration") {
    const auto d = parse_block_diagram(R"(["parallel", ["series", "R1", "R3"], ["series", "A1", "Re2"]])");
    CHECK(d.kind == BlockNode::Kind::Parallel);
    CHECK(d.leaves() == std::vector<Factor>{Factor::R1, Factor::R3, Factor::A1, Factor::Re2});
    CHECK(d.to_string() == "parallel(series(R1, R3), series(A1, Re2))");
    CHECK_THROWS_AS(parse_block_diagram(R"(["both", "R1"])"), ConfigError);
    CHECK_THROWS_AS(parse_block_diagram(R"(["series", "R9"])"), ConfigError);
    const auto cfg = parse_config(R"({"block_diagram": ["series", "R1", "R2"]})");
    REQUIRE(cfg.diagram.has_value());
}

TEST_CASE("write_text creates directories") {
    const auto dir = scratch("write");
    write_text(dir / "a" / "b.txt", "hello");
    CHECK(read_text(dir / "a" / "b.txt") == "hello");
}
