#pragma once

#include "fsonet/analysis.hpp"
#include "fsonet/linkbudget.hpp"
#include "fsonet/orbit.hpp"
#include "fsonet/passes.hpp"
#include "fsonet/time.hpp"
#include "fsonet/weather.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsonet::scenario {

/// Physical dimension of a configuration value; selects the accepted units.
enum class Dimension {
    None,         // plain number
    Length,       // m
    Angle,        // deg (rad, mrad, urad accepted)
    SmallAngle,   // rad
    PowerDbw,     // dBW (W, mW, dBm accepted)
    Decibel,      // dB
    Frequency,    // Hz
    Temperature,  // K
    DataRate,     // bit/s
    DataVolume,   // bit
    Duration,     // s
    Fraction,     // [0, 1] (percent accepted)
};

/// Parses "<number> [unit]" into the SI base of `dim`. A bare number is taken
/// to be in the base unit. Throws Error(UnitError) for unknown units and
/// Error(ValueError) for malformed numbers.
double parse_quantity(std::string_view text, Dimension dim);

enum class SizeClass { Large, Mobile };

inline constexpr double kLargeRxAperture = 1.0;   // m
inline constexpr double kMobileRxAperture = 0.4;  // m

struct GroundStation {
    std::string id;
    std::string name;
    orbit::GeodeticSite site;
    SizeClass size_class = SizeClass::Mobile;
    link::TerminalSpec terminal;  // satellite transmitter joined with this receiver
    link::LinkEnvironment environment;
    double min_elevation = 10.0;  // deg
    double box_km = weather::kDefaultBoxKm;
    std::optional<double> cloud_probability;  // synthetic weather only
    std::optional<double> cn2;                // explicit override
};

struct NetworkConfiguration {
    std::string name;
    std::vector<std::string> station_ids;
};

struct WeatherSource {
    enum class Kind { Synthetic, Grid };
    Kind kind = Kind::Synthetic;
    std::uint64_t seed = 1;
    TimeWindow span{};  // synthetic span
    Seconds cadence{15 * 60};
    std::filesystem::path cloud_grid;
    std::optional<std::filesystem::path> turbulence_map;
};

struct Scenario {
    std::filesystem::path source;
    orbit::TwoLineElements tle;
    std::vector<GroundStation> stations;  // catalog order
    std::vector<NetworkConfiguration> configurations;
    TimeWindow window{};
    double threshold = 0.1;
    link::NoiseSpec noise;
    link::LossModel loss;
    double generation_rate_bps = 0.0;
    double buffer_capacity_bits = 0.0;  // 0: no buffer accounting
    double c_max_bps = 1e9;
    bool normalize_largest = true;
    Seconds availability_cadence = analysis::kAvailabilityCadence;
    WeatherSource weather;

    /// Throws Error(MissingKey) for an unknown id.
    const GroundStation& station(std::string_view id) const;
    std::size_t station_index(std::string_view id) const;
    const NetworkConfiguration& configuration(std::string_view name) const;
};

/// `section.key=value`, applied to the parsed file before interpretation.
struct Override {
    std::string section;
    std::string key;
    std::string value;
};

/// Throws Error(ConfigError) when `text` lacks a `section.key=value` shape.
Override parse_override(std::string_view text);

/// Relative data paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir,
                        std::span<const Override> overrides = {}, std::string_view source = "<memory>");
Scenario load_scenario(const std::filesystem::path& path, std::span<const Override> overrides = {});

/// Per-station weather in catalog order, cloud fraction plus C_n^2 resolved
/// from the station override, the turbulence map, or the default.
std::vector<weather::WeatherSeries> load_weather(const Scenario& scenario);

struct StationData {
    std::size_t station = 0;  // catalog index
    std::vector<passes::Pass> passes;
    weather::WeatherSeries weather;  // restricted to the scenario window
    std::vector<std::vector<weather::WeatherSample>> pass_weather;  // step-held, one per sample
};

struct JoinedData {
    TimeWindow window{};
    std::vector<StationData> stations;  // catalog order
};

/// Passes for every station joined with its weather. Throws
/// Error(SpanMismatch) naming the uncovered interval when a series does not
/// cover the window.
JoinedData integrate(const Scenario& scenario, std::vector<weather::WeatherSeries> weather);
JoinedData integrate(const Scenario& scenario);

struct ConfigurationResult {
    std::string name;
    std::vector<std::string> station_ids;
    analysis::AvailabilityReport availability;
    analysis::ThroughputSummary throughput;
    std::optional<analysis::BufferReport> buffer;  // absent without a buffer capacity
    std::optional<double> pdt_pct;  // normalized when the scenario asks for it
};

struct SweepResult {
    std::vector<ConfigurationResult> configurations;  // scenario order
    std::optional<std::string> normalized_to;
    analysis::CorrelationMatrix correlation;  // catalog stations
};

/// Throughput and buffer inputs for one configuration.
std::vector<analysis::StationLink> station_links(const Scenario& scenario, const JoinedData& joined,
                                                 const NetworkConfiguration& configuration);

ConfigurationResult evaluate_configuration(const Scenario& scenario, const JoinedData& joined,
                                           const NetworkConfiguration& configuration);

SweepResult run_sweep(const Scenario& scenario, const JoinedData& joined);

}  // namespace fsonet::scenario
