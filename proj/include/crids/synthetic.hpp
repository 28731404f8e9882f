#pragma once

// Generated study fixture: random sites, GeoJSON layers and elevations, with two
// site columns (capacity_redundancy, median_household_income) solved so that the
// assessed indices fall into prescribed bands.

#include <cstdint>
#include <filesystem>
#include <string>

namespace crids {

struct SyntheticSpec {
    std::size_t site_count = 1000;
    std::uint64_t seed = 42;
    double extent = 20000.0;  // square side, ft

    double share_below_low = 0.08;   // sites with index < low_threshold
    double share_below_high = 0.32;  // sites with index < high_threshold
    double low_threshold = 0.1;
    double high_threshold = 0.5;

    std::size_t wellheads = 500;
    std::size_t overflows = 500;
    std::size_t sewer_lines = 2000;
    std::size_t canals = 1000;
    std::size_t drainage_lines = 5906;
    std::size_t wetlands = 80;
    std::size_t flood_zones = 4;
    std::size_t wellfield_zones = 5;
    std::size_t moratorium_basins = 5;

    std::size_t feature_count() const {
        return wellheads + overflows + sewer_lines + canals + drainage_lines + wetlands + flood_zones +
               wellfield_zones + moratorium_basins;
    }
};

struct SyntheticFixture {
    std::filesystem::path config;  // config.json inside the fixture directory
    std::size_t below_low = 0;
    std::size_t below_high = 0;
};

/// Writes sites.csv, elevations.csv, layers/*.geojson and config.json into `dir`.
/// Throws Error if the requested shares cannot be met.
SyntheticFixture write_synthetic_fixture(const std::filesystem::path& dir, const SyntheticSpec& spec = {});

}  // namespace crids
