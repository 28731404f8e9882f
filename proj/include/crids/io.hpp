#pragma once

// Loaders for sites, elevation samples, per-site cost tables and GeoJSON layers.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crids/csv.hpp"
#include "crids/geo.hpp"
#include "crids/model.hpp"

namespace crids {

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id) : Error("duplicate site id: " + id), id(id) {}
    std::string id;
};

class KindMismatch : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    GeometryError(const std::string& source, std::size_t feature, const std::string& what)
        : Error(source + ": feature " + std::to_string(feature) + ": " + what), feature(feature) {}
    std::size_t feature;
};

/// Column aliases applied before canonical lookup. Includes the headers of the
/// published three-site table (APNO, VerticalSepDist, Dist.Sewer, ...).
std::map<std::string, std::string> default_column_aliases();

/// Sites table: required id, x, y; factor columns by canonical name or code;
/// other columns kept as metadata. Empty cells mean "absent".
std::vector<Site> parse_sites(const CsvTable& table,
                              const std::map<std::string, std::string>& aliases = default_column_aliases());
std::vector<Site> load_sites(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& aliases = default_column_aliases());

/// Inverse of parse_sites: id, x, y, every factor present on some site, then metadata keys.
std::string write_sites(const std::vector<Site>& sites);

/// Columns id, ground_elevation, groundwater_elevation.
std::map<std::string, ElevationSample> load_elevations(const std::filesystem::path& path);

/// Per-site numeric columns keyed by id: result[column][site_id].
std::map<std::string, std::map<std::string, double>> load_cost_table(const std::filesystem::path& path);

struct LayerSource {
    std::filesystem::path path;
    std::optional<LayerKind> expected_kind;
};

/// Parses a GeoJSON FeatureCollection (or single Feature / bare geometry).
FeatureLayer parse_geojson(std::string_view text, const std::string& name,
                           std::optional<LayerKind> expected_kind = std::nullopt);

std::map<std::string, FeatureLayer> load_layers(const std::map<std::string, LayerSource>& sources);

/// GeoJSON text for a layer; attributes become feature properties.
std::string to_geojson(const FeatureLayer& layer);

}  // namespace crids
