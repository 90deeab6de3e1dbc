#pragma once

#include "fsonet/linkbudget.hpp"
#include "fsonet/passes.hpp"
#include "fsonet/time.hpp"
#include "fsonet/weather.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsonet::analysis {

inline constexpr Seconds kAvailabilityCadence{15 * 60};

struct MonthValue {
    YearMonth month;
    double value = 0.0;
};

struct StationAvailability {
    std::string station_id;
    std::vector<MonthValue> per_month;  // percent, complete months only
    std::optional<double> overall_pct;  // mean of per_month
    double tick_pct = 0.0;              // mean over every tick
};

struct AvailabilityReport {
    double threshold = 0.1;
    TimeWindow span{};
    std::vector<UtcTime> ticks;
    std::vector<std::uint8_t> available;  // A(t) per tick, 0 or 1
    std::vector<MonthValue> per_month;    // percent, complete months only
    std::optional<double> overall_pct;    // mean of the monthly values
    double tick_pct = 0.0;                // 100 * mean A(t) over all ticks
    std::vector<StationAvailability> per_station;

    std::optional<double> outage_pct() const {
        return overall_pct ? std::optional<double>(100.0 - *overall_pct) : std::nullopt;
    }
};

/// A(t) = 1 when any station has cloud fraction strictly below `threshold`,
/// evaluated at every cadence tick over the intersection of the series
/// spans. Months not fully covered by the ticks are left out of the monthly
/// and overall figures.
AvailabilityReport availability_series(std::span<const weather::WeatherSeries> stations, double threshold,
                                       Seconds cadence = kAvailabilityCadence);

/// Intersection of the series spans; throws Error(NoOverlap) when empty.
TimeWindow common_span(std::span<const weather::WeatherSeries> stations);

/// One station's contribution to a throughput evaluation. The environment
/// supplies attenuation, margin and a fallback C_n^2; cloud fraction (and
/// C_n^2 where present) come from the weather series by step-hold.
struct StationLink {
    std::string station_id;
    std::span<const passes::Pass> passes;
    const weather::WeatherSeries* weather = nullptr;
    link::TerminalSpec terminal;
    link::LinkEnvironment environment;
};

struct PassThroughput {
    std::string pass_id;
    std::string station_id;
    UtcTime aos{};
    UtcTime los{};
    double duration_s = 0.0;
    double rate_bps = 0.0;  // C_i, time-mean achieved rate
    double bits = 0.0;      // C_i * t_i
};

struct ThroughputSummary {
    double total_bits = 0.0;        // T
    double max_bits = 0.0;          // M
    std::optional<double> pdt_pct;  // 100 T / M, absent when M = 0
    std::vector<MonthValue> per_month;  // bits, grouped by AOS month
    std::vector<PassThroughput> per_pass;
};

/// Per pass, the achieved rate of each stored sample is the Shannon
/// capacity capped at `c_max` (zero when clouds block the link), with the
/// satellite serving one station at a time: when passes of several stations
/// overlap, a sample is credited only if its station has the highest raw
/// capacity at that instant (catalog order breaks ties). C_i is the
/// time-weighted mean over the pass samples.
ThroughputSummary throughput(std::span<const StationLink> stations, const link::NoiseSpec& noise,
                             const link::LossModel& model, double c_max);

/// Sample weights (s) for the time-mean over a pass: half the gap to each
/// neighbouring sample. They sum to the pass duration.
std::vector<double> sample_weights(const passes::Pass& pass);

struct Contact {
    UtcTime start{};   // inclusive
    UtcTime end{};     // exclusive
    std::int64_t rate_bps = 0;
};

struct BufferPoint {
    UtcTime time{};
    std::int64_t fill_bits = 0;
    std::int64_t generated_bits = 0;
    std::int64_t downlinked_bits = 0;
    std::int64_t lost_bits = 0;
};

struct BufferReport {
    std::int64_t capacity_bits = 0;
    std::int64_t generation_rate_bps = 0;
    std::int64_t generated_bits = 0;
    std::int64_t downlinked_bits = 0;
    std::int64_t lost_bits = 0;
    std::int64_t fill_bits = 0;
    std::vector<BufferPoint> trajectory;
};

/// Piecewise-linear onboard buffer: fills at the generation rate, drains at
/// the contact rate (max over simultaneous contacts), overflow is lost.
/// Integer bit arithmetic; generated = downlinked + lost + fill holds exactly.
BufferReport buffer_simulate(std::span<const Contact> contacts, std::int64_t generation_rate_bps,
                             std::int64_t capacity_bits, const TimeWindow& span, std::int64_t initial_fill_bits = 0);

/// Contacts from per-pass results, rates truncated to whole bits per second.
std::vector<Contact> contacts_from(std::span<const PassThroughput> per_pass);

/// Sample Pearson correlation. Throws Error(DegenerateSeries) when either
/// input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> station_ids;
    std::vector<std::optional<double>> values;  // row-major; absent when undefined

    std::size_t size() const { return station_ids.size(); }
    const std::optional<double>& at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

/// Pairwise correlation of cloud fraction over common ticks (step-hold).
CorrelationMatrix pearson_cloud_correlation(std::span<const weather::WeatherSeries> stations,
                                            Seconds cadence = kAvailabilityCadence);

void write_availability_monthly_csv(const std::string& path, const AvailabilityReport& report);
void write_station_availability_csv(const std::string& path, const AvailabilityReport& report);
void write_throughput_monthly_csv(const std::string& path, const ThroughputSummary& summary);
void write_per_pass_csv(const std::string& path, const ThroughputSummary& summary);
void write_correlation_csv(const std::string& path, const CorrelationMatrix& matrix);
void write_buffer_csv(const std::string& path, const BufferReport& report);

}  // namespace fsonet::analysis
