#include "fsonet/passes.hpp"

#include "fsonet/csv.hpp"
#include "fsonet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fsonet::passes {

namespace {

struct Interval {
    UtcTime aos;
    UtcTime los;
};

class ElevationProbe {
public:
    ElevationProbe(const orbit::TwoLineElements& tle, const orbit::GeodeticSite& site, double mask,
                   const orbit::PropagatorOptions& options)
        : tle_(tle), site_(site), mask_(mask), options_(options) {}

    double elevation(UtcTime t) const { return orbit::look_angles(tle_, site_, t, options_).elevation; }
    bool visible(UtcTime t) const { return elevation(t) >= mask_; }
    double mask() const { return mask_; }

    // lo not visible, hi visible: first visible second in (lo, hi].
    UtcTime rise(UtcTime lo, UtcTime hi) const {
        while (hi - lo > Seconds{1}) {
            const UtcTime mid = lo + (hi - lo) / 2;
            (visible(mid) ? hi : lo) = mid;
        }
        return hi;
    }

    // lo visible, hi not visible: last visible second in [lo, hi).
    UtcTime set(UtcTime lo, UtcTime hi) const {
        while (hi - lo > Seconds{1}) {
            const UtcTime mid = lo + (hi - lo) / 2;
            (visible(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    // Integer-second maximum of a unimodal elevation profile on [lo, hi].
    UtcTime peak(UtcTime lo, UtcTime hi) const {
        while (hi - lo > Seconds{2}) {
            const UtcTime m1 = lo + (hi - lo) / 3;
            const UtcTime m2 = hi - (hi - lo) / 3;
            if (elevation(m1) < elevation(m2)) {
                lo = m1 + Seconds{1};
            } else {
                hi = m2 - Seconds{1};
            }
        }
        UtcTime best = lo;
        double best_elevation = elevation(lo);
        for (UtcTime t = lo + Seconds{1}; t <= hi; t += Seconds{1}) {
            const double e = elevation(t);
            if (e > best_elevation) {
                best = t;
                best_elevation = e;
            }
        }
        return best;
    }

private:
    const orbit::TwoLineElements& tle_;
    const orbit::GeodeticSite& site_;
    double mask_;
    orbit::PropagatorOptions options_;
};

void validate_search(const TimeWindow& window, double min_elevation) {
    if (!(min_elevation >= 0.0 && min_elevation < 90.0)) {
        throw Error(ErrorCode::InvalidThreshold, fmt::format("minimum elevation {} outside [0, 90)", min_elevation));
    }
    if (window.end < window.start) {
        throw Error(ErrorCode::InvalidWindow, "window end precedes start");
    }
    if (window.length() > kMaxWindow) {
        throw Error(ErrorCode::WindowTooLarge,
                    fmt::format("window of {} s exceeds 400 days", window.length().count()));
    }
}

}  // namespace

std::vector<UtcTime> sample_instants(UtcTime aos, UtcTime los, Seconds cadence) {
    std::vector<UtcTime> out{aos};
    const auto c = cadence.count();
    const auto a = aos.time_since_epoch().count();
    const auto floor_div = a / c - ((a % c != 0 && a < 0) ? 1 : 0);
    for (auto s = (floor_div + 1) * c; s < los.time_since_epoch().count(); s += c) {
        out.emplace_back(Seconds{s});
    }
    if (los > aos) {
        out.push_back(los);
    }
    return out;
}

std::vector<Pass> find_passes(const orbit::TwoLineElements& tle, const orbit::GeodeticSite& site,
                              const TimeWindow& window, double min_elevation, const std::string& station_id,
                              const PassSearch& search) {
    validate_search(window, min_elevation);
    site.validate();
    if (window.length() == Seconds{0}) {
        return {};
    }

    const ElevationProbe probe(tle, site, min_elevation, search.propagator);

    std::vector<UtcTime> ticks;
    for (UtcTime t = window.start; t < window.end; t += search.coarse_step) {
        ticks.push_back(t);
    }
    ticks.push_back(window.end);
    std::vector<double> elevation(ticks.size());
    std::transform(ticks.begin(), ticks.end(), elevation.begin(), [&](UtcTime t) { return probe.elevation(t); });
    auto vis = [&](std::size_t k) { return elevation[k] >= min_elevation; };

    std::vector<Interval> intervals;
    std::optional<UtcTime> open;
    if (vis(0)) {
        open = ticks[0];
    }
    for (std::size_t k = 1; k < ticks.size(); ++k) {
        if (!vis(k - 1) && vis(k)) {
            open = probe.rise(ticks[k - 1], ticks[k]);
        } else if (vis(k - 1) && !vis(k)) {
            intervals.push_back({*open, probe.set(ticks[k - 1], ticks[k])});
            open.reset();
        }
    }
    if (open) {
        intervals.push_back({*open, window.end});
    }

    // Short passes whose whole arc fits between two coarse ticks: look for
    // coarse-grid local maxima that stay below the mask and refine them.
    const double lowest = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ticks.size(); ++k) {
        const double before = k > 0 ? elevation[k - 1] : lowest;
        const double after = k + 1 < ticks.size() ? elevation[k + 1] : lowest;
        if (vis(k) || before >= min_elevation || after >= min_elevation) {
            continue;
        }
        if (elevation[k] < before || elevation[k] < after || elevation[k] < min_elevation - 5.0) {
            continue;
        }
        const UtcTime lo = k > 0 ? ticks[k - 1] : ticks[k];
        const UtcTime hi = k + 1 < ticks.size() ? ticks[k + 1] : ticks[k];
        const UtcTime top = probe.peak(lo, hi);
        if (!probe.visible(top)) {
            continue;
        }
        const bool seen = std::any_of(intervals.begin(), intervals.end(),
                                      [&](const Interval& iv) { return iv.aos <= top && top <= iv.los; });
        if (seen) {
            continue;
        }
        const UtcTime aos = top == lo ? lo : probe.rise(lo, top);
        const UtcTime los = top == hi ? hi : probe.set(top, hi);
        intervals.push_back({aos, los});
    }
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.aos < b.aos; });

    std::vector<Pass> out;
    out.reserve(intervals.size());
    for (const Interval& iv : intervals) {
        if (iv.los <= iv.aos) {
            continue;  // a single visible second
        }
        Pass pass;
        pass.station_id = station_id;
        pass.aos = iv.aos;
        pass.los = iv.los;
        for (UtcTime t : sample_instants(iv.aos, iv.los, search.sample_cadence)) {
            pass.samples.push_back(orbit::look_angles(tle, site, t, search.propagator));
        }
        pass.max_elevation = std::max_element(pass.samples.begin(), pass.samples.end(),
                                              [](const auto& a, const auto& b) { return a.elevation < b.elevation; })
                                 ->elevation;
        out.push_back(std::move(pass));
    }
    return out;
}

PassStatistics pass_statistics(std::span<const Pass> passes) {
    PassStatistics stats;
    stats.count = passes.size();
    double elevation_sum = 0.0;
    for (const Pass& p : passes) {
        stats.total_duration += p.duration_seconds();
        elevation_sum += p.max_elevation;
    }
    if (stats.count > 0) {
        stats.mean_duration = stats.total_duration / static_cast<double>(stats.count);
        stats.mean_max_elevation = elevation_sum / static_cast<double>(stats.count);
    }
    return stats;
}

void write_passes_csv(const std::string& path, std::span<const Pass> passes) {
    CsvWriter csv(path, {"station_id", "aos_iso8601", "los_iso8601", "duration_s", "max_elevation_deg"});
    for (const Pass& p : passes) {
        csv.row({p.station_id, to_iso8601(p.aos), to_iso8601(p.los), std::to_string(p.duration().count()),
                 format_fixed(p.max_elevation, 3)});
    }
}

}  // namespace fsonet::passes
