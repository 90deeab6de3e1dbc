#pragma once

#include "fsonet/orbit.hpp"
#include "fsonet/time.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsonet::passes {

inline constexpr Seconds kCoarseStep{30};
inline constexpr Seconds kSampleCadence{10};
inline constexpr Seconds kMaxWindow{400LL * 86400};

/// One visibility interval. `aos` is the first whole second at or above the
/// elevation mask, `los` the last; passes cut by the search window are
/// truncated at its boundaries.
struct Pass {
    std::string station_id;
    UtcTime aos{};
    UtcTime los{};
    double max_elevation = 0.0;  // deg, max over samples
    std::vector<orbit::TopocentricState> samples;

    Seconds duration() const { return los - aos; }
    double duration_seconds() const { return static_cast<double>(duration().count()); }
};

struct PassSearch {
    orbit::PropagatorOptions propagator{};
    Seconds coarse_step = kCoarseStep;
    Seconds sample_cadence = kSampleCadence;
};

/// Visibility intervals of the satellite above `min_elevation` (deg) seen
/// from `site` within `window`, time ordered and disjoint.
std::vector<Pass> find_passes(const orbit::TwoLineElements& tle, const orbit::GeodeticSite& site,
                              const TimeWindow& window, double min_elevation, const std::string& station_id = {},
                              const PassSearch& search = {});

/// Sample instants stored for a pass: `aos`, every multiple of the cadence
/// (counted from the Unix epoch) strictly inside, and `los`.
std::vector<UtcTime> sample_instants(UtcTime aos, UtcTime los, Seconds cadence = kSampleCadence);

struct PassStatistics {
    std::size_t count = 0;
    double total_duration = 0.0;                 // s
    std::optional<double> mean_duration;         // s
    std::optional<double> mean_max_elevation;    // deg
};

PassStatistics pass_statistics(std::span<const Pass> passes);

/// `passes.csv`: station_id, aos_iso8601, los_iso8601, duration_s, max_elevation_deg
void write_passes_csv(const std::string& path, std::span<const Pass> passes);

}  // namespace fsonet::passes
