#include "fsonet/analysis.hpp"

#include "fsonet/csv.hpp"
#include "fsonet/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace fsonet::analysis {

namespace {

struct MonthTally {
    std::size_t ticks = 0;
    std::size_t hits = 0;
};

std::vector<MonthValue> complete_month_percentages(const std::map<YearMonth, MonthTally>& tallies, UtcTime first_tick,
                                                   UtcTime last_tick, Seconds cadence) {
    std::vector<MonthValue> out;
    for (const auto& [month, tally] : tallies) {
        const bool starts_inside = month.first_instant() >= first_tick;
        const bool ends_inside = month.next().first_instant() - cadence <= last_tick;
        if (starts_inside && ends_inside && tally.ticks > 0) {
            out.push_back({month, 100.0 * static_cast<double>(tally.hits) / static_cast<double>(tally.ticks)});
        }
    }
    return out;
}

std::optional<double> mean_of(const std::vector<MonthValue>& months) {
    if (months.empty()) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (const auto& m : months) {
        sum += m.value;
    }
    return sum / static_cast<double>(months.size());
}

struct EvaluatedPass {
    std::size_t station = 0;
    const passes::Pass* pass = nullptr;
    std::vector<double> raw;       // Shannon capacity per sample
    std::vector<double> credited;  // achieved rate after cap and assignment

    // Raw capacity in effect at t (latest sample at or before t).
    double raw_at(UtcTime t) const {
        const auto& s = pass->samples;
        auto it = std::upper_bound(s.begin(), s.end(), t,
                                   [](UtcTime v, const orbit::TopocentricState& x) { return v < x.time; });
        return raw[static_cast<std::size_t>(std::distance(s.begin(), it)) - 1];
    }
};

}  // namespace

TimeWindow common_span(std::span<const weather::WeatherSeries> stations) {
    if (stations.empty()) {
        throw Error(ErrorCode::NoOverlap, "no weather series given");
    }
    TimeWindow span{UtcTime::min(), UtcTime::max()};
    for (const auto& s : stations) {
        if (s.samples.empty()) {
            throw Error(ErrorCode::NoOverlap, fmt::format("weather series '{}' is empty", s.station_id));
        }
        span.start = std::max(span.start, s.first());
        span.end = std::min(span.end, s.last());
    }
    if (span.end < span.start) {
        throw Error(ErrorCode::NoOverlap, "weather series spans do not overlap");
    }
    return span;
}

AvailabilityReport availability_series(std::span<const weather::WeatherSeries> stations, double threshold,
                                       Seconds cadence) {
    if (cadence <= Seconds{0}) {
        throw Error(ErrorCode::DomainError, "availability cadence must be positive");
    }
    AvailabilityReport report;
    report.threshold = threshold;
    report.span = common_span(stations);

    std::map<YearMonth, MonthTally> network;
    std::vector<std::map<YearMonth, MonthTally>> single(stations.size());
    std::vector<std::size_t> single_hits(stations.size(), 0);
    std::size_t hits = 0;
    for (UtcTime t = report.span.start; t <= report.span.end; t += cadence) {
        const YearMonth month = year_month_of(t);
        bool any = false;
        for (std::size_t i = 0; i < stations.size(); ++i) {
            const bool clear = weather::cflos(stations[i], t, threshold);
            auto& tally = single[i][month];
            ++tally.ticks;
            if (clear) {
                ++tally.hits;
                ++single_hits[i];
                any = true;
            }
        }
        auto& tally = network[month];
        ++tally.ticks;
        if (any) {
            ++tally.hits;
            ++hits;
        }
        report.ticks.push_back(t);
        report.available.push_back(any ? 1 : 0);
    }

    const UtcTime first = report.ticks.front();
    const UtcTime last = report.ticks.back();
    const double n = static_cast<double>(report.ticks.size());
    report.per_month = complete_month_percentages(network, first, last, cadence);
    report.overall_pct = mean_of(report.per_month);
    report.tick_pct = 100.0 * static_cast<double>(hits) / n;
    for (std::size_t i = 0; i < stations.size(); ++i) {
        StationAvailability sa;
        sa.station_id = stations[i].station_id;
        sa.per_month = complete_month_percentages(single[i], first, last, cadence);
        sa.overall_pct = mean_of(sa.per_month);
        sa.tick_pct = 100.0 * static_cast<double>(single_hits[i]) / n;
        report.per_station.push_back(std::move(sa));
    }
    return report;
}

std::vector<double> sample_weights(const passes::Pass& pass) {
    const auto& s = pass.samples;
    std::vector<double> w(s.size(), 0.0);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double half = 0.5 * static_cast<double>((s[k + 1].time - s[k].time).count());
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

ThroughputSummary throughput(std::span<const StationLink> stations, const link::NoiseSpec& noise,
                             const link::LossModel& model, double c_max) {
    if (!(c_max > 0.0)) {
        throw Error(ErrorCode::DomainError, fmt::format("c_max {} must be positive", c_max));
    }
    std::vector<EvaluatedPass> evaluated;
    for (std::size_t si = 0; si < stations.size(); ++si) {
        const StationLink& st = stations[si];
        for (const passes::Pass& pass : st.passes) {
            if (pass.samples.empty()) {
                throw Error(ErrorCode::InvariantViolation, fmt::format("pass of '{}' has no samples", st.station_id));
            }
            EvaluatedPass ev;
            ev.station = si;
            ev.pass = &pass;
            for (const auto& sample : pass.samples) {
                if (st.weather == nullptr || !st.weather->covers(sample.time)) {
                    throw Error(ErrorCode::SpecMismatch,
                                fmt::format("weather for '{}' does not cover {}", st.station_id,
                                            to_iso8601(sample.time)));
                }
                const weather::WeatherSample& w = st.weather->at(sample.time);
                link::LinkEnvironment env = st.environment;
                env.cloud_fraction = w.cloud_fraction;
                if (w.cn2) {
                    env.cn2 = *w.cn2;
                }
                double raw = 0.0;
                if (sample.elevation > 0.0) {
                    raw = link::link_budget(st.terminal, noise, env, sample, model).capacity_bps;
                }
                ev.raw.push_back(raw);
            }
            ev.credited.assign(ev.raw.size(), 0.0);
            evaluated.push_back(std::move(ev));
        }
    }

    // Single-terminal assignment between overlapping passes of different stations.
    std::vector<std::size_t> order(evaluated.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return evaluated[a].pass->aos < evaluated[b].pass->aos; });
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        EvaluatedPass& me = evaluated[order[oi]];
        std::vector<const EvaluatedPass*> rivals;
        for (std::size_t oj = 0; oj < order.size(); ++oj) {
            const EvaluatedPass& other = evaluated[order[oj]];
            if (other.pass->aos > me.pass->los) {
                break;
            }
            if (other.station != me.station && other.pass->los >= me.pass->aos) {
                rivals.push_back(&other);
            }
        }
        for (std::size_t k = 0; k < me.raw.size(); ++k) {
            const UtcTime t = me.pass->samples[k].time;
            bool wins = true;
            for (const EvaluatedPass* rival : rivals) {
                if (t < rival->pass->aos || t > rival->pass->los) {
                    continue;
                }
                const double theirs = rival->raw_at(t);
                if (theirs > me.raw[k] || (theirs == me.raw[k] && rival->station < me.station)) {
                    wins = false;
                    break;
                }
            }
            me.credited[k] = wins ? std::min(me.raw[k], c_max) : 0.0;
        }
    }

    ThroughputSummary summary;
    std::map<YearMonth, double> monthly;
    std::vector<std::size_t> pass_counter(stations.size(), 0);
    for (const EvaluatedPass& ev : evaluated) {
        const passes::Pass& pass = *ev.pass;
        const std::vector<double> w = sample_weights(pass);
        double weighted = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            weighted += w[k] * ev.credited[k];
        }
        const double t_i = pass.duration_seconds();
        PassThroughput pt;
        pt.station_id = stations[ev.station].station_id;
        pt.pass_id = fmt::format("{}-{:04d}", pt.station_id, ++pass_counter[ev.station]);
        pt.aos = pass.aos;
        pt.los = pass.los;
        pt.duration_s = t_i;
        pt.rate_bps = t_i > 0.0 ? weighted / t_i : ev.credited.front();
        pt.bits = pt.rate_bps * t_i;
        summary.total_bits += pt.bits;
        summary.max_bits += c_max * t_i;
        monthly[year_month_of(pass.aos)] += pt.bits;
        summary.per_pass.push_back(std::move(pt));
    }
    if (summary.max_bits > 0.0) {
        summary.pdt_pct = 100.0 * summary.total_bits / summary.max_bits;
    }
    for (const auto& [month, bits] : monthly) {
        summary.per_month.push_back({month, bits});
    }
    return summary;
}

BufferReport buffer_simulate(std::span<const Contact> contacts, std::int64_t generation_rate_bps,
                             std::int64_t capacity_bits, const TimeWindow& span, std::int64_t initial_fill_bits) {
    if (capacity_bits <= 0) {
        throw Error(ErrorCode::DomainError, "buffer capacity must be positive");
    }
    if (generation_rate_bps < 0 || initial_fill_bits < 0 || initial_fill_bits > capacity_bits) {
        throw Error(ErrorCode::DomainError, "generation rate and initial fill must be non-negative and fit");
    }
    for (const Contact& c : contacts) {
        if (c.rate_bps < 0) {
            throw Error(ErrorCode::DomainError, "contact rate must be non-negative");
        }
    }
    if (span.end < span.start) {
        throw Error(ErrorCode::InvalidWindow, "buffer span end precedes start");
    }

    std::vector<UtcTime> edges{span.start, span.end};
    for (const Contact& c : contacts) {
        for (UtcTime t : {c.start, c.end}) {
            if (t > span.start && t < span.end) {
                edges.push_back(t);
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    BufferReport r;
    r.capacity_bits = capacity_bits;
    r.generation_rate_bps = generation_rate_bps;
    r.fill_bits = initial_fill_bits;
    r.generated_bits = initial_fill_bits;
    const auto record = [&r](UtcTime t) {
        r.trajectory.push_back({t, r.fill_bits, r.generated_bits, r.downlinked_bits, r.lost_bits});
    };
    record(span.start);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const UtcTime a = edges[k];
        const UtcTime b = edges[k + 1];
        const std::int64_t length = (b - a).count();
        std::int64_t rate = 0;
        for (const Contact& c : contacts) {
            if (c.start <= a && b <= c.end) {
                rate = std::max(rate, c.rate_bps);
            }
        }
        const std::int64_t generated = generation_rate_bps * length;
        r.generated_bits += generated;
        if (rate >= generation_rate_bps) {
            const std::int64_t downlinked = std::min(r.fill_bits + generated, rate * length);
            r.downlinked_bits += downlinked;
            r.fill_bits += generated - downlinked;
        } else {
            const std::int64_t downlinked = rate * length;
            r.downlinked_bits += downlinked;
            const std::int64_t unclamped = r.fill_bits + generated - downlinked;
            const std::int64_t overflow = std::max<std::int64_t>(0, unclamped - capacity_bits);
            r.lost_bits += overflow;
            r.fill_bits = unclamped - overflow;
        }
        record(b);
    }
    return r;
}

std::vector<Contact> contacts_from(std::span<const PassThroughput> per_pass) {
    std::vector<Contact> out;
    out.reserve(per_pass.size());
    for (const auto& p : per_pass) {
        out.push_back({p.aos, p.los, static_cast<std::int64_t>(std::floor(p.rate_bps))});
    }
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::DomainError, "pearson needs two equal-length series of at least two values");
    }
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    if (constant(x) || constant(y)) {
        throw Error(ErrorCode::DegenerateSeries, "series with zero variance has no correlation");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_cloud_correlation(std::span<const weather::WeatherSeries> stations, Seconds cadence) {
    if (stations.size() < 2) {
        throw Error(ErrorCode::DomainError, "correlation needs at least two stations");
    }
    if (cadence <= Seconds{0}) {
        throw Error(ErrorCode::DomainError, "correlation cadence must be positive");
    }
    const TimeWindow span = common_span(stations);
    std::vector<std::vector<double>> aligned(stations.size());
    for (UtcTime t = span.start; t <= span.end; t += cadence) {
        for (std::size_t i = 0; i < stations.size(); ++i) {
            aligned[i].push_back(stations[i].cloud_fraction_at(t));
        }
    }
    CorrelationMatrix m;
    const std::size_t n = stations.size();
    for (const auto& s : stations) {
        m.station_ids.push_back(s.station_id);
    }
    m.values.assign(n * n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            try {
                const double r = i == j ? (pearson(aligned[i], aligned[i]), 1.0) : pearson(aligned[i], aligned[j]);
                m.values[i * n + j] = r;
                m.values[j * n + i] = r;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateSeries) {
                    throw;
                }
            }
        }
    }
    return m;
}

void write_availability_monthly_csv(const std::string& path, const AvailabilityReport& report) {
    CsvWriter csv(path, {"year_month", "availability_pct"});
    for (const auto& m : report.per_month) {
        csv.row({m.month.to_string(), format_fixed(m.value, 4)});
    }
}

void write_station_availability_csv(const std::string& path, const AvailabilityReport& report) {
    CsvWriter csv(path, {"station_id", "availability_pct", "tick_availability_pct"});
    for (const auto& s : report.per_station) {
        csv.row({s.station_id, s.overall_pct ? format_fixed(*s.overall_pct, 4) : std::string{},
                 format_fixed(s.tick_pct, 4)});
    }
}

void write_throughput_monthly_csv(const std::string& path, const ThroughputSummary& summary) {
    CsvWriter csv(path, {"year_month", "gbits"});
    for (const auto& m : summary.per_month) {
        csv.row({m.month.to_string(), format_fixed(m.value / 1e9, 6)});
    }
}

void write_per_pass_csv(const std::string& path, const ThroughputSummary& summary) {
    CsvWriter csv(path, {"pass_id", "station", "c_i_bps", "bits"});
    for (const auto& p : summary.per_pass) {
        csv.row({p.pass_id, p.station_id, format_fixed(p.rate_bps, 3), format_fixed(p.bits, 0)});
    }
}

void write_correlation_csv(const std::string& path, const CorrelationMatrix& matrix) {
    std::vector<std::string> header{"station"};
    header.insert(header.end(), matrix.station_ids.begin(), matrix.station_ids.end());
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        std::vector<std::string> row{matrix.station_ids[i]};
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            const auto& v = matrix.at(i, j);
            row.push_back(v ? format_fixed(*v, 6) : std::string{});
        }
        csv.row(row);
    }
}

void write_buffer_csv(const std::string& path, const BufferReport& report) {
    CsvWriter csv(path, {"timestamp", "fill_bits", "lost_total_bits"});
    for (const auto& p : report.trajectory) {
        csv.row({to_iso8601(p.time), std::to_string(p.fill_bits), std::to_string(p.lost_bits)});
    }
}

}  // namespace fsonet::analysis
