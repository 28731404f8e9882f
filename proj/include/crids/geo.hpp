#pragma once

// Planar geometry kernel and feature extraction: nearest-feature distances over a
// uniform grid index, polygon membership, and vertical separation under a scenario.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "crids/model.hpp"

namespace crids {

class EmptyLayer : public Error {
public:
    using Error::Error;
};

class MissingLayer : public Error {
public:
    using Error::Error;
};

using Ring = std::vector<Point>;

struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

enum class LayerKind : std::uint8_t { Points, Polylines, Polygons };

std::string_view to_string(LayerKind k);

using AttributeValue = std::variant<std::monostate, bool, double, std::string>;
using Attributes = std::map<std::string, AttributeValue>;

/// One feature of a layer. Only the member matching the layer kind is populated.
struct Feature {
    std::vector<Point> points;
    std::vector<std::vector<Point>> lines;
    std::vector<Polygon> polygons;
    Attributes attributes;

    std::optional<double> number(const std::string& key) const;
};

struct FeatureLayer {
    std::string name;
    LayerKind kind = LayerKind::Points;
    std::vector<Feature> features;

    bool empty() const;
};

struct BoundingBox {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void expand(Point p);
    void expand(const BoundingBox& b);
    bool valid() const { return min_x <= max_x && min_y <= max_y; }
    bool contains(Point p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
};

BoundingBox bounds_of(const FeatureLayer& layer);

double point_segment_distance(Point p, Point a, Point b);

/// Even-odd test over the outer ring and holes; points on any ring edge count as inside.
bool point_in_polygon(Point p, const Polygon& polygon);

struct NearestFeature {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t feature = std::numeric_limits<std::size_t>::max();
};

inline constexpr double kDefaultCellSize = 500.0;

/// Uniform grid over a layer's segments (points are zero-length segments; polygon
/// rings contribute their edges). Each primitive is registered in every cell its
/// bounding box overlaps.
class GridIndex {
public:
    GridIndex(const FeatureLayer& layer, double cell_size = kDefaultCellSize);

    /// Exact nearest feature by expanding ring search. Polygons containing `p`
    /// are at distance 0. Ties go to the lowest feature ordinal.
    NearestFeature nearest(Point p) const;

    double cell_size() const { return cell_size_; }
    const BoundingBox& bounds() const { return bounds_; }
    std::size_t segment_count() const { return segments_.size(); }
    std::size_t cell_count() const { return cells_.size(); }

private:
    struct Segment {
        Point a;
        Point b;
        std::uint32_t feature;
    };
    struct Cell {
        std::vector<std::uint32_t> segments;
        std::vector<std::uint32_t> polygons;  // into polygons_
    };
    struct IndexedPolygon {
        std::uint32_t feature;
        Polygon polygon;
    };

    std::int64_t cell_x(double x) const;
    std::int64_t cell_y(double y) const;
    static std::uint64_t key(std::int64_t ix, std::int64_t iy);
    void visit_cell(std::int64_t ix, std::int64_t iy, Point p, NearestFeature& best) const;

    double cell_size_;
    BoundingBox bounds_;
    std::int64_t nx_ = 0;
    std::int64_t ny_ = 0;
    std::vector<Segment> segments_;
    std::vector<IndexedPolygon> polygons_;
    std::unordered_map<std::uint64_t, Cell> cells_;
};

GridIndex build_grid_index(const FeatureLayer& layer, double cell_size = kDefaultCellSize);

NearestFeature nearest_feature_distance(Point p, const FeatureLayer& layer, const GridIndex& index);

// ---------------------------------------------------------------------------
// Elevation and feature extraction
// ---------------------------------------------------------------------------

struct ElevationSample {
    std::string site_id;
    double ground_elevation = 0.0;       // ft, parcel average
    double groundwater_elevation = 0.0;  // ft, wet-season max
};

/// ground - drainfield depth - (groundwater + SLR x response ratio). May be negative.
double vertical_separation(const ElevationSample& sample, const Scenario& scenario);

enum class Measure : std::uint8_t {
    Distance,           // nearest-feature distance
    Inside,             // 1 inside any polygon, else 0
    AttributeIfInside,  // largest numeric attribute among containing polygons, else outside_value
};

std::optional<Measure> parse_measure(std::string_view text);
std::string_view to_string(Measure m);

struct LayerBinding {
    std::string layer;
    Measure measure = Measure::Distance;
    std::string attribute;
    double outside_value = 0.0;
};

struct FeatureBindings {
    PerFactor<std::optional<LayerBinding>> layers{};
    bool vertical_separation_from_elevation = true;

    void bind(Factor f, LayerBinding b) { layers[index_of(f)] = std::move(b); }

    /// Sewer, wellheads, canals, drainage, overflow, flood zones, wetlands,
    /// wellfield zones and moratorium basins.
    static FeatureBindings defaults();
};

struct ExtractionResult {
    std::vector<Site> sites;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> site_errors;
};

/// Fills each site's raw factor values from the bound layers and elevation samples.
/// Raw values already present on a site are kept; factors bound to an empty distance
/// layer stay absent (with a warning).
ExtractionResult extract_features(const std::vector<Site>& sites,
                                  const std::map<std::string, FeatureLayer>& layers,
                                  const std::map<std::string, ElevationSample>& samples,
                                  const Scenario& scenario,
                                  const FeatureBindings& bindings = FeatureBindings::defaults(),
                                  double cell_size = kDefaultCellSize, unsigned workers = 1);

}  // namespace crids
