#include "crids/io.hpp"

#include <set>

#include "json.hpp"

namespace crids {

using nlohmann::json;

std::map<std::string, std::string> default_column_aliases() {
    return {
        {"APNO", "id"},
        {"VerticalSepDist", "vertical_separation"},
        {"BaseFloodElev", "flood_exposure"},
        {"Dist.Wetland", "wetland_distance"},
        {"Dist.Wellhead", "wellhead_distance"},
        {"Dist.Canal", "canal_distance"},
        {"Dist.SDrainage", "drainage_distance"},
        {"System_Age", "system_age"},
        {"Dist.Sewer", "sewer_distance"},
        {"Dist.Overflow", "overflow_distance"},
    };
}

std::vector<Site> parse_sites(const CsvTable& table, const std::map<std::string, std::string>& aliases) {
    enum class Role { Id, X, Y, FactorColumn, Meta };
    struct Col {
        Role role;
        Factor factor = Factor::R1;
        std::string name;
    };
    std::vector<Col> cols;
    std::set<std::string> seen;
    for (const auto& h : table.header) {
        std::string name = h;
        if (auto it = aliases.find(h); it != aliases.end()) name = it->second;
        if (!seen.insert(name).second) throw ParseError(table.source, 1, "duplicate column " + name);
        if (name == "id") {
            cols.push_back({Role::Id, Factor::R1, name});
        } else if (name == "x") {
            cols.push_back({Role::X, Factor::R1, name});
        } else if (name == "y") {
            cols.push_back({Role::Y, Factor::R1, name});
        } else if (auto f = parse_factor(name)) {
            cols.push_back({Role::FactorColumn, *f, name});
        } else {
            cols.push_back({Role::Meta, Factor::R1, h});
        }
    }
    for (const char* required : {"id", "x", "y"}) {
        if (!seen.count(required)) throw ParseError(table.source, 1, std::string("missing required column ") + required);
    }

    std::vector<Site> sites;
    std::set<std::string> ids;
    sites.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Site s;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& text = row.fields[c];
            auto number = [&]() {
                auto v = parse_number(text);
                if (!v) throw ParseError(table.source, row.line, "column " + cols[c].name + ": not a number: '" + text + "'");
                return *v;
            };
            switch (cols[c].role) {
                case Role::Id:
                    if (text.empty()) throw ParseError(table.source, row.line, "empty site id");
                    s.id = text;
                    break;
                case Role::X: s.point.x = number(); break;
                case Role::Y: s.point.y = number(); break;
                case Role::FactorColumn:
                    if (!text.empty()) s.raw[index_of(cols[c].factor)] = number();
                    break;
                case Role::Meta:
                    if (!text.empty()) s.metadata[cols[c].name] = text;
                    break;
            }
        }
        if (!ids.insert(s.id).second) throw DuplicateId(s.id);
        sites.push_back(std::move(s));
    }
    return sites;
}

std::vector<Site> load_sites(const std::filesystem::path& path, const std::map<std::string, std::string>& aliases) {
    return parse_sites(read_csv(path), aliases);
}

std::string write_sites(const std::vector<Site>& sites) {
    std::vector<Factor> factors;
    for (const auto& fi : registry()) {
        for (const auto& s : sites) {
            if (s.raw[index_of(fi.factor)]) {
                factors.push_back(fi.factor);
                break;
            }
        }
    }
    std::set<std::string> meta;
    for (const auto& s : sites) {
        for (const auto& [k, v] : s.metadata) meta.insert(k);
    }
    std::string out;
    std::vector<std::string> header{"id", "x", "y"};
    for (Factor f : factors) header.emplace_back(to_string(f));
    header.insert(header.end(), meta.begin(), meta.end());
    append_row(out, header);
    for (const auto& s : sites) {
        std::vector<std::string> row{s.id, format_shortest(s.point.x), format_shortest(s.point.y)};
        for (Factor f : factors) {
            const auto& v = s.raw[index_of(f)];
            row.push_back(v ? format_shortest(*v) : std::string());
        }
        for (const auto& k : meta) {
            auto it = s.metadata.find(k);
            row.push_back(it == s.metadata.end() ? std::string() : it->second);
        }
        append_row(out, row);
    }
    return out;
}

std::map<std::string, ElevationSample> load_elevations(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    const auto id = table.column("id");
    const auto ground = table.column("ground_elevation");
    const auto water = table.column("groundwater_elevation");
    if (!id || !ground || !water) {
        throw ParseError(table.source, 1, "elevations need id, ground_elevation, groundwater_elevation");
    }
    std::map<std::string, ElevationSample> out;
    for (const auto& row : table.rows) {
        auto g = parse_number(row.fields[*ground]);
        auto w = parse_number(row.fields[*water]);
        if (!g || !w) throw ParseError(table.source, row.line, "non-numeric elevation");
        const auto& sid = row.fields[*id];
        if (!out.emplace(sid, ElevationSample{sid, *g, *w}).second) throw DuplicateId(sid);
    }
    return out;
}

std::map<std::string, std::map<std::string, double>> load_cost_table(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    const auto id = table.column("id");
    if (!id) throw ParseError(table.source, 1, "cost table needs an id column");
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == *id || row.fields[c].empty()) continue;
            auto v = parse_number(row.fields[c]);
            if (!v) throw ParseError(table.source, row.line, "non-numeric value in column " + table.header[c]);
            out[table.header[c]][row.fields[*id]] = *v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// GeoJSON
// ---------------------------------------------------------------------------

namespace {

struct GeoReader {
    const std::string& source;
    std::size_t feature;

    [[noreturn]] void fail(const std::string& what) const { throw GeometryError(source, feature, what); }

    Point point(const json& j) const {
        if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number()) fail("bad position");
        return {j[0].get<double>(), j[1].get<double>()};
    }
    std::vector<Point> points(const json& j) const {
        if (!j.is_array()) fail("expected a position array");
        std::vector<Point> out;
        out.reserve(j.size());
        for (const auto& p : j) out.push_back(point(p));
        return out;
    }
    std::vector<Point> line(const json& j) const {
        auto pts = points(j);
        if (pts.size() < 2) fail("linestring needs at least two positions");
        return pts;
    }
    Ring ring(const json& j) const {
        auto pts = points(j);
        if (!pts.empty() && !(pts.front() == pts.back())) pts.push_back(pts.front());
        if (pts.size() < 4) fail("polygon ring needs at least three distinct positions");
        return pts;
    }
    Polygon polygon(const json& j) const {
        if (!j.is_array() || j.empty()) fail("polygon needs an outer ring");
        Polygon p;
        p.outer = ring(j[0]);
        for (std::size_t i = 1; i < j.size(); ++i) p.holes.push_back(ring(j[i]));
        return p;
    }
};

LayerKind read_geometry(const json& geom, const GeoReader& rd, Feature& f) {
    if (!geom.is_object() || !geom.contains("type") || !geom.contains("coordinates")) {
        rd.fail("geometry needs type and coordinates");
    }
    const auto type = geom["type"].get<std::string>();
    const auto& c = geom["coordinates"];
    if (type == "Point") {
        f.points.push_back(rd.point(c));
        return LayerKind::Points;
    }
    if (type == "MultiPoint") {
        f.points = rd.points(c);
        return LayerKind::Points;
    }
    if (type == "LineString") {
        f.lines.push_back(rd.line(c));
        return LayerKind::Polylines;
    }
    if (type == "MultiLineString") {
        if (!c.is_array()) rd.fail("bad MultiLineString");
        for (const auto& l : c) f.lines.push_back(rd.line(l));
        return LayerKind::Polylines;
    }
    if (type == "Polygon") {
        f.polygons.push_back(rd.polygon(c));
        return LayerKind::Polygons;
    }
    if (type == "MultiPolygon") {
        if (!c.is_array()) rd.fail("bad MultiPolygon");
        for (const auto& p : c) f.polygons.push_back(rd.polygon(p));
        return LayerKind::Polygons;
    }
    rd.fail("unsupported geometry type " + type);
}

AttributeValue to_attribute(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return std::monostate{};
    return v.dump();
}

}  // namespace

FeatureLayer parse_geojson(std::string_view text, const std::string& name, std::optional<LayerKind> expected_kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw GeometryError(name, 0, std::string("invalid JSON: ") + e.what());
    }
    std::vector<json> features;
    const auto type = doc.value("type", std::string());
    if (type == "FeatureCollection") {
        if (!doc.contains("features") || !doc["features"].is_array()) throw GeometryError(name, 0, "missing features array");
        for (const auto& f : doc["features"]) features.push_back(f);
    } else if (type == "Feature") {
        features.push_back(doc);
    } else {
        features.push_back(json{{"type", "Feature"}, {"geometry", doc}, {"properties", json::object()}});
    }

    FeatureLayer layer;
    layer.name = name;
    std::optional<LayerKind> kind;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& fj = features[i];
        GeoReader rd{name, i};
        if (!fj.is_object() || !fj.contains("geometry")) rd.fail("feature without geometry");
        Feature f;
        LayerKind k;
        try {
            k = read_geometry(fj["geometry"], rd, f);
        } catch (const json::exception& e) {
            rd.fail(e.what());
        }
        if (kind && *kind != k) {
            throw KindMismatch("layer '" + name + "' mixes " + std::string(to_string(*kind)) + " and " +
                               std::string(to_string(k)));
        }
        kind = k;
        if (fj.contains("properties") && fj["properties"].is_object()) {
            for (const auto& [key, value] : fj["properties"].items()) f.attributes[key] = to_attribute(value);
        }
        layer.features.push_back(std::move(f));
    }
    layer.kind = kind.value_or(expected_kind.value_or(LayerKind::Points));
    if (expected_kind && layer.kind != *expected_kind) {
        throw KindMismatch("layer '" + name + "' holds " + std::string(to_string(layer.kind)) + ", expected " +
                           std::string(to_string(*expected_kind)));
    }
    return layer;
}

std::map<std::string, FeatureLayer> load_layers(const std::map<std::string, LayerSource>& sources) {
    std::map<std::string, FeatureLayer> out;
    for (const auto& [name, src] : sources) {
        out.emplace(name, parse_geojson(read_text(src.path), name, src.expected_kind));
    }
    return out;
}

std::string to_geojson(const FeatureLayer& layer) {
    auto pos = [](Point p) { return json::array({p.x, p.y}); };
    auto ring = [&](const Ring& r) {
        json a = json::array();
        for (const auto& p : r) a.push_back(pos(p));
        return a;
    };
    json features = json::array();
    for (const auto& f : layer.features) {
        json geom;
        switch (layer.kind) {
            case LayerKind::Points:
                if (f.points.size() == 1) {
                    geom = {{"type", "Point"}, {"coordinates", pos(f.points[0])}};
                } else {
                    geom = {{"type", "MultiPoint"}, {"coordinates", ring(f.points)}};
                }
                break;
            case LayerKind::Polylines:
                if (f.lines.size() == 1) {
                    geom = {{"type", "LineString"}, {"coordinates", ring(f.lines[0])}};
                } else {
                    json ls = json::array();
                    for (const auto& l : f.lines) ls.push_back(ring(l));
                    geom = {{"type", "MultiLineString"}, {"coordinates", ls}};
                }
                break;
            case LayerKind::Polygons: {
                json polys = json::array();
                for (const auto& p : f.polygons) {
                    json rings = json::array({ring(p.outer)});
                    for (const auto& h : p.holes) rings.push_back(ring(h));
                    polys.push_back(rings);
                }
                if (polys.size() == 1) {
                    geom = {{"type", "Polygon"}, {"coordinates", polys[0]}};
                } else {
                    geom = {{"type", "MultiPolygon"}, {"coordinates", polys}};
                }
                break;
            }
        }
        json props = json::object();
        for (const auto& [k, v] : f.attributes) {
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        props[k] = nullptr;
                    } else {
                        props[k] = x;
                    }
                },
                v);
        }
        features.push_back({{"type", "Feature"}, {"geometry", geom}, {"properties", props}});
    }
    return json{{"type", "FeatureCollection"}, {"name", layer.name}, {"features", features}}.dump();
}

}  // namespace crids
