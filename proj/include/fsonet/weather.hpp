#pragma once

#include "fsonet/orbit.hpp"
#include "fsonet/time.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsonet::weather {

/// Default averaging region around a station (km, square).
inline constexpr double kDefaultBoxKm = 20.0;
/// Mean earth radius used to convert box sizes to degrees.
inline constexpr double kMeanEarthRadiusKm = 6371.0088;

/// Regular latitude/longitude grid. Cell (row, col) spans
/// [origin_lat + row*cell_size, origin_lat + (row+1)*cell_size) in latitude
/// and the same construction in longitude; row 0 is the southern edge.
struct GridLayout {
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    double cell_size = 1.0;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    double center_lat(std::size_t row) const { return origin_lat + (static_cast<double>(row) + 0.5) * cell_size; }
    double center_lon(std::size_t col) const { return origin_lon + (static_cast<double>(col) + 0.5) * cell_size; }
    double max_lat() const { return origin_lat + static_cast<double>(n_rows) * cell_size; }
    double max_lon() const { return origin_lon + static_cast<double>(n_cols) * cell_size; }
    bool contains(double lat, double lon) const;
};

struct GridFrame {
    UtcTime time{};
    std::vector<double> values;  // row-major, n_rows * n_cols

    double at(const GridLayout& layout, std::size_t row, std::size_t col) const {
        return values[row * layout.n_cols + col];
    }
};

struct GridSeries {
    GridLayout layout;
    std::vector<GridFrame> frames;
};

/// Single-frame grid of annual-average C_n^2. Values are stored as read;
/// no unit rescaling is applied.
struct TurbulenceMap {
    GridLayout layout;
    std::vector<double> values;
};

struct WeatherSample {
    UtcTime time{};
    double cloud_fraction = 0.0;    // [0, 1]
    std::optional<double> cn2;      // m^(-2/3)
};

/// Per-station time series. Sample i holds from its timestamp until the
/// next sample (step-hold); the series span is [first, last] inclusive.
struct WeatherSeries {
    std::string station_id;
    std::vector<WeatherSample> samples;

    UtcTime first() const { return samples.front().time; }
    UtcTime last() const { return samples.back().time; }
    bool covers(UtcTime t) const { return !samples.empty() && first() <= t && t <= last(); }

    /// Step-hold sample at `t`; throws Error(OutOfSpan) outside the span.
    const WeatherSample& at(UtcTime t) const;
    double cloud_fraction_at(UtcTime t) const { return at(t).cloud_fraction; }

    /// Throws Error(ValueError / TimeOrderError) when invariants fail.
    void validate() const;
};

/// Grid interchange text format:
///   GRID origin_lat origin_lon cell_size n_rows n_cols
///   FRAME <iso8601>
///   <n_rows lines of n_cols values>
///   ...
GridSeries parse_grid_series(std::string_view text, std::string_view source = "<memory>");
GridSeries load_grid_series(const std::string& path);

TurbulenceMap parse_turbulence_map(std::string_view text, std::string_view source = "<memory>");
TurbulenceMap load_turbulence_map(const std::string& path);

/// Serializes in the interchange format (values printed round-trip exact).
std::string format_grid_series(const GridSeries& grid);

/// Half extents in degrees (lat, lon) of a square box of side `box_km`
/// centered at `latitude`.
struct BoxExtent {
    double half_lat = 0.0;
    double half_lon = 0.0;
};
BoxExtent box_extent(double latitude, double box_km);

/// Cells whose centers fall inside the box (boundary inclusive), row-major.
std::vector<std::size_t> cells_in_box(const GridLayout& layout, const orbit::GeodeticSite& site, double box_km);

/// Mean cloud value per frame over the cells inside the box, with mask value
/// 2 mapped to 1.
WeatherSeries station_cloud_series(const GridSeries& grid, const orbit::GeodeticSite& site, double box_km,
                                   const std::string& station_id = {});

/// Value of the cell whose center is nearest the site; ties go to the lower
/// row index, then the lower column index.
double station_turbulence(const TurbulenceMap& map, const orbit::GeodeticSite& site);

/// Sets a constant turbulence value on every sample.
void attach_turbulence(WeatherSeries& series, double cn2);

/// Restriction of a series to `window`: the sample in effect at the window
/// start is re-stamped there and the last held value is repeated at the
/// window end. Throws Error(OutOfSpan) when the series does not cover it.
WeatherSeries slice(const WeatherSeries& series, const TimeWindow& window);

/// Cloud-free line of sight: cloud fraction at `t` (step-hold) strictly
/// below `threshold`.
bool cflos(const WeatherSeries& series, UtcTime t, double threshold);

/// Independent Bernoulli cloud draws per station and tick (fraction 0 or 1),
/// ticks at span.start + k*cadence up to span.end. Deterministic per seed.
std::vector<WeatherSeries> synth_weather(std::span<const double> cloud_probability, const TimeWindow& span,
                                         Seconds cadence, std::uint64_t seed);

/// Wide CSV: timestamp, one column per station.
void write_weather_csv(const std::string& path, std::span<const WeatherSeries> series);

}  // namespace fsonet::weather
