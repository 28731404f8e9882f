#include "crids/geo.hpp"

#include <algorithm>
#include <cmath>

#include "crids/parallel.hpp"

namespace crids {

namespace {

template <class Fn>
void for_each_edge(const Ring& ring, Fn&& fn) {
    const std::size_t n = ring.size();
    if (n == 0) return;
    if (n == 1) {
        fn(ring[0], ring[0]);
        return;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) fn(ring[i], ring[i + 1]);
    if (!(ring.front() == ring.back())) fn(ring.back(), ring.front());
}

bool on_segment(Point p, Point a, Point b) {
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross != 0.0) return false;
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
           p.y <= std::max(a.y, b.y);
}

std::vector<Point> dedupe(const std::vector<Point>& line) {
    std::vector<Point> out;
    out.reserve(line.size());
    for (const auto& p : line) {
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    return out;
}

}  // namespace

std::string_view to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Points: return "points";
        case LayerKind::Polylines: return "polylines";
        case LayerKind::Polygons: return "polygons";
    }
    return "?";
}

std::optional<double> Feature::number(const std::string& key) const {
    auto it = attributes.find(key);
    if (it == attributes.end()) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b ? 1.0 : 0.0;
    return std::nullopt;
}

bool FeatureLayer::empty() const {
    for (const auto& f : features) {
        if (!f.points.empty() || !f.lines.empty() || !f.polygons.empty()) return false;
    }
    return true;
}

void BoundingBox::expand(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
}

void BoundingBox::expand(const BoundingBox& b) {
    if (!b.valid()) return;
    expand(Point{b.min_x, b.min_y});
    expand(Point{b.max_x, b.max_y});
}

BoundingBox bounds_of(const FeatureLayer& layer) {
    BoundingBox box;
    for (const auto& f : layer.features) {
        for (const auto& p : f.points) box.expand(p);
        for (const auto& l : f.lines) {
            for (const auto& p : l) box.expand(p);
        }
        for (const auto& poly : f.polygons) {
            for (const auto& p : poly.outer) box.expand(p);
        }
    }
    return box;
}

double point_segment_distance(Point p, Point a, Point b) {
    // Canonical endpoint order makes the result bitwise symmetric in (a, b).
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool point_in_polygon(Point p, const Polygon& polygon) {
    bool boundary = false;
    auto check_boundary = [&](const Ring& ring) {
        for_each_edge(ring, [&](Point a, Point b) {
            if (!boundary && on_segment(p, a, b)) boundary = true;
        });
    };
    check_boundary(polygon.outer);
    for (const auto& h : polygon.holes) check_boundary(h);
    if (boundary) return true;

    bool inside = false;
    auto cast = [&](const Ring& ring) {
        for_each_edge(ring, [&](Point a, Point b) {
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < x_cross) inside = !inside;
            }
        });
    };
    cast(polygon.outer);
    for (const auto& h : polygon.holes) cast(h);
    return inside;
}

// ---------------------------------------------------------------------------
// GridIndex
// ---------------------------------------------------------------------------

GridIndex::GridIndex(const FeatureLayer& layer, double cell_size) : cell_size_(cell_size) {
    if (!(std::isfinite(cell_size) && cell_size > 0.0)) {
        throw InvalidParameter("grid cell size must be > 0");
    }
    if (layer.empty()) throw EmptyLayer("layer '" + layer.name + "' has no geometry");

    for (std::size_t fi = 0; fi < layer.features.size(); ++fi) {
        const auto& f = layer.features[fi];
        const auto id = static_cast<std::uint32_t>(fi);
        for (const auto& p : f.points) segments_.push_back({p, p, id});
        for (const auto& raw_line : f.lines) {
            const auto line = dedupe(raw_line);
            if (line.size() == 1) segments_.push_back({line[0], line[0], id});
            for (std::size_t i = 0; i + 1 < line.size(); ++i) segments_.push_back({line[i], line[i + 1], id});
        }
        for (const auto& poly : f.polygons) {
            for_each_edge(poly.outer, [&](Point a, Point b) { segments_.push_back({a, b, id}); });
            for (const auto& h : poly.holes) {
                for_each_edge(h, [&](Point a, Point b) { segments_.push_back({a, b, id}); });
            }
            polygons_.push_back({id, poly});
        }
    }
    for (const auto& s : segments_) {
        bounds_.expand(s.a);
        bounds_.expand(s.b);
    }
    nx_ = cell_x(bounds_.max_x) + 1;
    ny_ = cell_y(bounds_.max_y) + 1;

    auto register_box = [&](double x0, double y0, double x1, double y1, auto&& add) {
        const auto ix0 = cell_x(x0), ix1 = cell_x(x1);
        const auto iy0 = cell_y(y0), iy1 = cell_y(y1);
        for (auto ix = ix0; ix <= ix1; ++ix) {
            for (auto iy = iy0; iy <= iy1; ++iy) add(cells_[key(ix, iy)]);
        }
    };
    for (std::size_t si = 0; si < segments_.size(); ++si) {
        const auto& s = segments_[si];
        register_box(std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y), std::max(s.a.x, s.b.x),
                     std::max(s.a.y, s.b.y),
                     [&](Cell& c) { c.segments.push_back(static_cast<std::uint32_t>(si)); });
    }
    for (std::size_t pi = 0; pi < polygons_.size(); ++pi) {
        BoundingBox box;
        for (const auto& p : polygons_[pi].polygon.outer) box.expand(p);
        if (!box.valid()) continue;
        register_box(box.min_x, box.min_y, box.max_x, box.max_y,
                     [&](Cell& c) { c.polygons.push_back(static_cast<std::uint32_t>(pi)); });
    }
}

std::int64_t GridIndex::cell_x(double x) const {
    return static_cast<std::int64_t>(std::floor((x - bounds_.min_x) / cell_size_));
}

std::int64_t GridIndex::cell_y(double y) const {
    return static_cast<std::int64_t>(std::floor((y - bounds_.min_y) / cell_size_));
}

std::uint64_t GridIndex::key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint32_t>(iy);
}

void GridIndex::visit_cell(std::int64_t ix, std::int64_t iy, Point p, NearestFeature& best) const {
    auto it = cells_.find(key(ix, iy));
    if (it == cells_.end()) return;
    for (auto si : it->second.segments) {
        const auto& s = segments_[si];
        const double d = point_segment_distance(p, s.a, s.b);
        if (d < best.distance || (d == best.distance && s.feature < best.feature)) {
            best = {d, s.feature};
        }
    }
}

NearestFeature GridIndex::nearest(Point p) const {
    NearestFeature best;
    const auto cx = std::clamp<double>(std::floor((p.x - bounds_.min_x) / cell_size_), -4e15, 4e15);
    const auto cy = std::clamp<double>(std::floor((p.y - bounds_.min_y) / cell_size_), -4e15, 4e15);
    const auto icx = static_cast<std::int64_t>(cx);
    const auto icy = static_cast<std::int64_t>(cy);

    if (icx >= 0 && icx < nx_ && icy >= 0 && icy < ny_) {
        if (auto it = cells_.find(key(icx, icy)); it != cells_.end()) {
            for (auto pi : it->second.polygons) {
                const auto& ip = polygons_[pi];
                if (ip.feature < best.feature && point_in_polygon(p, ip.polygon)) best = {0.0, ip.feature};
            }
        }
    }

    // Rings closer than the grid itself are empty; start at the first ring touching it.
    const auto gap_x = std::max<std::int64_t>({0, -icx, icx - (nx_ - 1)});
    const auto gap_y = std::max<std::int64_t>({0, -icy, icy - (ny_ - 1)});
    for (std::int64_t r = std::max(gap_x, gap_y);; ++r) {
        const auto x0 = icx - r, x1 = icx + r, y0 = icy - r, y1 = icy + r;
        const auto cx0 = std::max<std::int64_t>(x0, 0), cx1 = std::min(x1, nx_ - 1);
        const auto cy0 = std::max<std::int64_t>(y0, 0), cy1 = std::min(y1, ny_ - 1);
        if (y0 >= 0 && y0 < ny_) {
            for (auto ix = cx0; ix <= cx1; ++ix) visit_cell(ix, y0, p, best);
        }
        if (r > 0 && y1 >= 0 && y1 < ny_) {
            for (auto ix = cx0; ix <= cx1; ++ix) visit_cell(ix, y1, p, best);
        }
        const auto iy_lo = std::max(cy0, y0 + 1), iy_hi = std::min(cy1, y1 - 1);
        if (x0 >= 0 && x0 < nx_) {
            for (auto iy = iy_lo; iy <= iy_hi; ++iy) visit_cell(x0, iy, p, best);
        }
        if (r > 0 && x1 >= 0 && x1 < nx_) {
            for (auto iy = iy_lo; iy <= iy_hi; ++iy) visit_cell(x1, iy, p, best);
        }

        if (x0 <= 0 && x1 >= nx_ - 1 && y0 <= 0 && y1 >= ny_ - 1) break;

        // Anything not yet visited lies outside the explored block of cells.
        const double left = p.x - (bounds_.min_x + static_cast<double>(x0) * cell_size_);
        const double right = bounds_.min_x + static_cast<double>(x1 + 1) * cell_size_ - p.x;
        const double down = p.y - (bounds_.min_y + static_cast<double>(y0) * cell_size_);
        const double up = bounds_.min_y + static_cast<double>(y1 + 1) * cell_size_ - p.y;
        const double reach = std::min({left, right, down, up});
        const double slack = 1e-9 * (cell_size_ + std::abs(p.x - bounds_.min_x) + std::abs(p.y - bounds_.min_y));
        if (best.distance < reach - slack) break;
    }
    return best;
}

GridIndex build_grid_index(const FeatureLayer& layer, double cell_size) {
    return GridIndex(layer, cell_size);
}

NearestFeature nearest_feature_distance(Point p, const FeatureLayer& layer, const GridIndex& index) {
    if (layer.empty()) throw EmptyLayer("layer '" + layer.name + "' has no geometry");
    return index.nearest(p);
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

double vertical_separation(const ElevationSample& sample, const Scenario& scenario) {
    return sample.ground_elevation - scenario.drainfield_depth -
           (sample.groundwater_elevation + scenario.sea_level_rise * scenario.groundwater_response_ratio);
}

std::optional<Measure> parse_measure(std::string_view text) {
    for (auto m : {Measure::Distance, Measure::Inside, Measure::AttributeIfInside}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::Distance: return "distance";
        case Measure::Inside: return "inside";
        case Measure::AttributeIfInside: return "attribute_if_inside";
    }
    return "?";
}

FeatureBindings FeatureBindings::defaults() {
    FeatureBindings b;
    b.bind(Factor::R2, {"flood_zones", Measure::AttributeIfInside, "BFE", 0.0});
    b.bind(Factor::A1, {"wetlands", Measure::Distance, {}, 0.0});
    b.bind(Factor::A2, {"wellfield_zones", Measure::Inside, {}, 0.0});
    b.bind(Factor::A3, {"wellheads", Measure::Distance, {}, 0.0});
    b.bind(Factor::A6, {"canals", Measure::Distance, {}, 0.0});
    b.bind(Factor::A7, {"drainage", Measure::Distance, {}, 0.0});
    b.bind(Factor::Re1, {"sewer", Measure::Distance, {}, 0.0});
    b.bind(Factor::Re3, {"overflow", Measure::Distance, {}, 0.0});
    b.bind(Factor::Re4, {"moratorium_basins", Measure::Inside, {}, 0.0});
    return b;
}

namespace {

struct BoundLayer {
    Factor factor;
    const LayerBinding* binding;
    const FeatureLayer* layer;
    std::optional<GridIndex> index;  // distance measures only
};

double polygon_measure(Point p, const FeatureLayer& layer, const LayerBinding& binding) {
    std::optional<double> best;
    for (const auto& f : layer.features) {
        for (const auto& poly : f.polygons) {
            if (!point_in_polygon(p, poly)) continue;
            if (binding.measure == Measure::Inside) return 1.0;
            if (auto v = f.number(binding.attribute)) best = best ? std::max(*best, *v) : *v;
        }
    }
    if (binding.measure == Measure::Inside) return 0.0;
    return best.value_or(binding.outside_value);
}

}  // namespace

ExtractionResult extract_features(const std::vector<Site>& sites,
                                  const std::map<std::string, FeatureLayer>& layers,
                                  const std::map<std::string, ElevationSample>& samples,
                                  const Scenario& scenario, const FeatureBindings& bindings,
                                  double cell_size, unsigned workers) {
    scenario.validate();
    std::vector<BoundLayer> bound;
    BoundingBox coverage;
    for (const auto& fi : registry()) {
        const auto& b = bindings.layers[index_of(fi.factor)];
        if (!b) continue;
        auto it = layers.find(b->layer);
        if (it == layers.end()) {
            throw MissingLayer("factor " + std::string(fi.name) + " is bound to missing layer '" + b->layer + "'");
        }
        const auto& layer = it->second;
        if (b->measure != Measure::Distance && layer.kind != LayerKind::Polygons) {
            throw MissingLayer("factor " + std::string(fi.name) + " needs a polygon layer, '" + b->layer +
                               "' holds " + std::string(to_string(layer.kind)));
        }
        BoundLayer bl{fi.factor, &*b, &layer, std::nullopt};
        if (b->measure == Measure::Distance && !layer.empty()) bl.index.emplace(layer, cell_size);
        coverage.expand(bounds_of(layer));
        bound.push_back(std::move(bl));
    }

    ExtractionResult result;
    result.sites = sites;
    for (const auto& bl : bound) {
        if (bl.binding->measure == Measure::Distance && !bl.index) {
            result.warnings.push_back("layer '" + bl.layer->name + "' is empty; " +
                                      std::string(to_string(bl.factor)) + " left absent");
        }
    }
    std::vector<std::string> errors(sites.size());
    std::vector<char> outside(sites.size(), 0);

    parallel_for(sites.size(), workers, [&](std::size_t i) {
        Site& site = result.sites[i];
        for (const auto& bl : bound) {
            auto& slot = site.raw[index_of(bl.factor)];
            if (slot) continue;
            if (bl.binding->measure == Measure::Distance) {
                if (!bl.index) continue;  // empty layer: factor stays absent
                slot = bl.index->nearest(site.point).distance;
            } else {
                slot = polygon_measure(site.point, *bl.layer, *bl.binding);
            }
        }
        if (bindings.vertical_separation_from_elevation && !site.raw[index_of(Factor::R3)]) {
            if (auto it = samples.find(site.id); it != samples.end()) {
                site.raw[index_of(Factor::R3)] = vertical_separation(it->second, scenario);
            } else {
                if (!errors[i].empty()) errors[i] += "; ";
                errors[i] += "no elevation sample";
            }
        }
        if (!bound.empty() && coverage.valid() && !coverage.contains(site.point)) outside[i] = 1;
    });

    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!errors[i].empty()) result.site_errors[sites[i].id] = errors[i];
        if (outside[i]) result.warnings.push_back("site " + sites[i].id + " lies outside all layer coverage");
    }
    return result;
}

}  // namespace crids
