#include "crids/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crids/pipeline.hpp"
#include "json.hpp"

namespace crids {

namespace {

constexpr double kIncomeReference = 60000.0;
constexpr double kIncomeShape = 3.0;
constexpr double kIncomeSaturation = 1e4;  // income / reference when the score must be ~1

// Bit-level uniform draws so fixtures do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform(0.0, static_cast<double>(n))) % n; }

private:
    std::mt19937_64 engine_;
};

std::vector<Point> random_walk(Rng& rng, double extent, std::size_t min_vertices, std::size_t max_vertices,
                               double min_step, double max_step) {
    const std::size_t n = min_vertices + rng.below(max_vertices - min_vertices + 1);
    std::vector<Point> line{{rng.uniform(0, extent), rng.uniform(0, extent)}};
    double heading = rng.uniform(0, 2 * std::numbers::pi);
    while (line.size() < n) {
        heading += rng.uniform(-0.6, 0.6);
        const double step = rng.uniform(min_step, max_step);
        line.push_back({line.back().x + step * std::cos(heading), line.back().y + step * std::sin(heading)});
    }
    return line;
}

Polygon blob(Rng& rng, Point center, double radius, std::size_t vertices) {
    Polygon poly;
    for (std::size_t k = 0; k < vertices; ++k) {
        const double a = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(vertices);
        const double r = radius * rng.uniform(0.7, 1.0);
        poly.outer.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    poly.outer.push_back(poly.outer.front());
    return poly;
}

FeatureLayer point_layer(const std::string& name, Rng& rng, std::size_t n, double extent) {
    FeatureLayer layer{name, LayerKind::Points, {}};
    for (std::size_t i = 0; i < n; ++i) {
        Feature f;
        f.points.push_back({rng.uniform(0, extent), rng.uniform(0, extent)});
        layer.features.push_back(std::move(f));
    }
    return layer;
}

FeatureLayer line_layer(const std::string& name, Rng& rng, std::size_t n, double extent, std::size_t min_v,
                        std::size_t max_v, double min_step, double max_step) {
    FeatureLayer layer{name, LayerKind::Polylines, {}};
    for (std::size_t i = 0; i < n; ++i) {
        Feature f;
        f.lines.push_back(random_walk(rng, extent, min_v, max_v, min_step, max_step));
        layer.features.push_back(std::move(f));
    }
    return layer;
}

FeatureLayer blob_layer(const std::string& name, Rng& rng, std::size_t n, double extent, double min_r,
                        double max_r) {
    FeatureLayer layer{name, LayerKind::Polygons, {}};
    for (std::size_t i = 0; i < n; ++i) {
        Feature f;
        const Point c{rng.uniform(0, extent), rng.uniform(0, extent)};
        f.polygons.push_back(blob(rng, c, rng.uniform(min_r, max_r), 10));
        layer.features.push_back(std::move(f));
    }
    return layer;
}

// Square zones of side extent/10, one per grid cell so they never overlap.
FeatureLayer flood_layer(Rng& rng, std::size_t n, double extent) {
    FeatureLayer layer{"flood_zones", LayerKind::Polygons, {}};
    const double side = extent / 10.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = static_cast<double>(2 * i % 10) * side;
        const double y0 = static_cast<double>((2 * i / 10) * 3 % 10) * side;
        Feature f;
        f.polygons.push_back(Polygon{{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}, {x0, y0}}, {}});
        f.attributes["BFE"] = std::round(rng.uniform(6.0, 12.0) * 10.0) / 10.0;
        layer.features.push_back(std::move(f));
    }
    return layer;
}

std::string config_text() {
    nlohmann::ordered_json doc;
    doc["scenario"] = {{"name", "synthetic"}};
    doc["inputs"] = {{"sites", "sites.csv"}, {"elevations", "elevations.csv"}, {"layers_dir", "layers"}};
    doc["transforms"] = {
        {"system_age", {{"function", "inverse_grade"}, {"x_min", 0}, {"x_max", 60}}},
        {"median_household_income", {{"function", "sigmoid"}, {"f1", kIncomeShape}, {"f2", kIncomeReference}}}};
    return doc.dump(2) + "\n";
}

std::vector<double> band(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& t : v) t = rng.uniform(lo, hi);
    return v;
}

}  // namespace

SyntheticFixture write_synthetic_fixture(const std::filesystem::path& dir, const SyntheticSpec& spec) {
    if (spec.site_count == 0) throw InvalidParameter("synthetic fixture needs at least one site");
    Rng rng(spec.seed);
    const double e = spec.extent;

    std::vector<FeatureLayer> layers;
    layers.push_back(point_layer("wellheads", rng, spec.wellheads, e));
    layers.push_back(point_layer("overflow", rng, spec.overflows, e));
    layers.push_back(line_layer("sewer", rng, spec.sewer_lines, e, 3, 6, 100, 400));
    layers.push_back(line_layer("canals", rng, spec.canals, e, 3, 8, 300, 800));
    layers.push_back(line_layer("drainage", rng, spec.drainage_lines, e, 2, 3, 50, 200));
    layers.push_back(blob_layer("wetlands", rng, spec.wetlands, e, 100, 300));
    layers.push_back(flood_layer(rng, spec.flood_zones, e));
    layers.push_back(blob_layer("wellfield_zones", rng, spec.wellfield_zones, e, 400, 800));
    layers.push_back(blob_layer("moratorium_basins", rng, spec.moratorium_basins, e, 1000, 2000));
    for (const auto& layer : layers) write_text(dir / "layers" / (layer.name + ".geojson"), to_geojson(layer));

    std::vector<Site> sites(spec.site_count);
    std::string elevations = "id,ground_elevation,groundwater_elevation\n";
    const int width = static_cast<int>(std::to_string(spec.site_count).size());
    for (std::size_t i = 0; i < spec.site_count; ++i) {
        auto& s = sites[i];
        char id[32];
        std::snprintf(id, sizeof id, "S%0*zu", std::max(width, 4), i + 1);
        s.id = id;
        s.point = {rng.uniform(0, e), rng.uniform(0, e)};
        s.raw[index_of(Factor::A5)] = std::round(rng.uniform(1.0, 60.0));
        s.raw[index_of(Factor::A8)] = std::round(rng.uniform(0.7, 1.0) * 1000.0) / 1000.0;
        const double gw = rng.uniform(1.0, 4.0);
        const double vsd = rng.uniform(8.0, 20.0);
        const double ground = gw + Scenario{}.drainfield_depth + vsd;
        append_row(elevations, {s.id, format_shortest(ground), format_shortest(gw)});
    }
    write_text(dir / "elevations.csv", elevations);
    const auto config_path = dir / "config.json";
    write_text(config_path, config_text());

    // First pass without R1 and Re2: both score 1, leaving q = resistivity and A = adaptability * recovery.
    write_text(dir / "sites.csv", write_sites(sites));
    const auto config = load_config(config_path);
    const auto first = run_assess(config);
    if (first.succeeded() != sites.size()) throw Error("synthetic fixture: assessment failed for some sites");

    std::vector<std::size_t> order(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> q(sites.size()), adapt(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& m = *first.sites[i].membership;  // report order equals id order equals generation order
        q[i] = m.resistivity;
        adapt[i] = m.adaptability * m.recovery;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });

    const auto n_low = static_cast<std::size_t>(std::llround(spec.share_below_low * static_cast<double>(spec.site_count)));
    const auto n_below_high =
        static_cast<std::size_t>(std::llround(spec.share_below_high * static_cast<double>(spec.site_count)));
    if (n_low > n_below_high || n_below_high > spec.site_count) throw InvalidParameter("synthetic shares out of order");
    const double lo = spec.low_threshold;
    const double hi = spec.high_threshold;
    auto targets = band(rng, spec.site_count - n_below_high, hi + 0.05, std::min(0.9, hi + 0.4));
    auto mid = band(rng, n_below_high - n_low, lo + 0.05, hi - 0.05);
    auto low = band(rng, n_low, lo * 0.2, lo * 0.8);
    std::sort(targets.rbegin(), targets.rend());
    std::sort(mid.rbegin(), mid.rend());
    std::sort(low.rbegin(), low.rend());
    targets.insert(targets.end(), mid.begin(), mid.end());
    targets.insert(targets.end(), low.begin(), low.end());

    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        const double t = targets[k];
        const double a = adapt[i];
        double income = 0.0;
        if (a > 0.0) {
            const double s = std::min(1.0, t / (2.0 * a));
            if (s >= 1.0 - 1e-9) {
                income = kIncomeReference * kIncomeSaturation;
            } else if (s > 0.0) {
                income = kIncomeReference * std::pow(s / (1.0 - s), 1.0 / kIncomeShape);
            }
        }
        income = std::round(income * 100.0) / 100.0;
        const double x = a * sigmoid_membership(income, kIncomeShape, kIncomeReference);
        const double r1 = (t - x) / ((1.0 - x) * q[i]);
        if (!(r1 >= 0.0 && r1 <= 1.0)) {
            throw Error("synthetic fixture: site " + sites[i].id + " cannot reach its target index");
        }
        sites[i].raw[index_of(Factor::R1)] = r1;
        sites[i].raw[index_of(Factor::Re2)] = income;
    }
    write_text(dir / "sites.csv", write_sites(sites));

    const auto second = run_assess(config);
    std::vector<double> idx;
    for (const auto& sa : second.sites) {
        if (sa.ok()) idx.push_back(sa.membership->index);
    }
    const std::array<double, 2> th{lo, hi};
    const auto summary = summarize(idx, th);
    SyntheticFixture out{config_path, summary.below[0].count, summary.below[1].count};
    if (idx.size() != sites.size() || out.below_low != n_low || out.below_high != n_below_high) {
        throw Error("synthetic fixture: generated shares do not match the request");
    }
    return out;
}

}  // namespace crids
