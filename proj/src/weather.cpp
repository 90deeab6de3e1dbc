#include "fsonet/weather.hpp"

#include "fsonet/csv.hpp"
#include "fsonet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace fsonet::weather {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t b = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > b) {
            out.push_back(line.substr(b, i - b));
        }
    }
    return out;
}

struct Line {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

// Non-empty, non-comment lines with their 1-based line numbers.
std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++number;
        auto tokens = split_ws(line);
        if (!tokens.empty() && tokens.front().front() != '#') {
            out.push_back({number, std::move(tokens)});
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, std::string_view source, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error(ErrorCode::SchemaError,
                    fmt::format("{}:{}: '{}' is not a valid number", source, line, std::string(token)));
    }
    return value;
}

GridSeries parse_grid_text(std::string_view text, std::string_view source) {
    const auto lines = tokenize(text);
    if (lines.empty() || lines.front().tokens.front() != "GRID" || lines.front().tokens.size() != 6) {
        throw Error(ErrorCode::SchemaError,
                    fmt::format("{}: first line must be 'GRID origin_lat origin_lon cell_size n_rows n_cols'", source));
    }
    const auto& h = lines.front();
    GridSeries grid;
    grid.layout.origin_lat = parse_number<double>(h.tokens[1], source, h.number);
    grid.layout.origin_lon = parse_number<double>(h.tokens[2], source, h.number);
    grid.layout.cell_size = parse_number<double>(h.tokens[3], source, h.number);
    const auto rows = parse_number<long long>(h.tokens[4], source, h.number);
    const auto cols = parse_number<long long>(h.tokens[5], source, h.number);
    if (!(grid.layout.cell_size > 0.0) || rows <= 0 || cols <= 0) {
        throw Error(ErrorCode::SchemaError,
                    fmt::format("{}:{}: cell_size, n_rows and n_cols must be positive", source, h.number));
    }
    grid.layout.n_rows = static_cast<std::size_t>(rows);
    grid.layout.n_cols = static_cast<std::size_t>(cols);

    std::size_t i = 1;
    while (i < lines.size()) {
        const auto& f = lines[i];
        if (f.tokens.front() != "FRAME" || f.tokens.size() != 2) {
            throw Error(ErrorCode::SchemaError, fmt::format("{}:{}: expected 'FRAME <iso8601>'", source, f.number));
        }
        GridFrame frame;
        try {
            frame.time = parse_iso8601(f.tokens[1]);
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, fmt::format("{}:{}: {}", source, f.number, e.what()));
        }
        if (!grid.frames.empty() && frame.time <= grid.frames.back().time) {
            throw Error(ErrorCode::TimeOrderError,
                        fmt::format("{}:{}: frame {} is not after {}", source, f.number, to_iso8601(frame.time),
                                    to_iso8601(grid.frames.back().time)));
        }
        ++i;
        frame.values.reserve(grid.layout.n_rows * grid.layout.n_cols);
        for (std::size_t r = 0; r < grid.layout.n_rows; ++r, ++i) {
            if (i >= lines.size() || lines[i].tokens.front() == "FRAME") {
                throw Error(ErrorCode::SchemaError,
                            fmt::format("{}:{}: frame has {} rows, expected {}", source, f.number, r,
                                        grid.layout.n_rows));
            }
            const auto& row = lines[i];
            if (row.tokens.size() != grid.layout.n_cols) {
                throw Error(ErrorCode::SchemaError, fmt::format("{}:{}: expected {} values, got {}", source,
                                                                row.number, grid.layout.n_cols, row.tokens.size()));
            }
            for (auto token : row.tokens) {
                frame.values.push_back(parse_number<double>(token, source, row.number));
            }
        }
        grid.frames.push_back(std::move(frame));
    }
    return grid;
}

bool valid_cloud_value(double v) { return v == 2.0 || (v >= 0.0 && v <= 1.0); }

double cloud_value(double v) { return v == 2.0 ? 1.0 : v; }

void require_coverage(const GridLayout& layout, const orbit::GeodeticSite& site) {
    if (!layout.contains(site.latitude, site.longitude)) {
        throw Error(ErrorCode::OutOfCoverage,
                    fmt::format("site ({}, {}) outside grid [{}, {}] x [{}, {}]", site.latitude, site.longitude,
                                layout.origin_lat, layout.max_lat(), layout.origin_lon, layout.max_lon()));
    }
}

std::size_t nearest_index(double x, double origin, double cell, std::size_t n) {
    const double f = std::floor((x - origin) / cell - 0.5);
    auto clamp = [n](double k) {
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
    };
    const std::size_t lo = clamp(f);
    const std::size_t hi = clamp(f + 1.0);
    const double d_lo = std::abs(origin + (static_cast<double>(lo) + 0.5) * cell - x);
    const double d_hi = std::abs(origin + (static_cast<double>(hi) + 0.5) * cell - x);
    return d_hi < d_lo ? hi : lo;
}

}  // namespace

bool GridLayout::contains(double lat, double lon) const {
    return lat >= origin_lat && lat <= max_lat() && lon >= origin_lon && lon <= max_lon();
}

const WeatherSample& WeatherSeries::at(UtcTime t) const {
    if (!covers(t)) {
        throw Error(ErrorCode::OutOfSpan,
                    fmt::format("{} outside weather span of '{}'", to_iso8601(t), station_id));
    }
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](UtcTime value, const WeatherSample& s) { return value < s.time; });
    return *std::prev(it);
}

void WeatherSeries::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!(s.cloud_fraction >= 0.0 && s.cloud_fraction <= 1.0)) {
            throw Error(ErrorCode::ValueError, fmt::format("'{}': cloud fraction {} at {} outside [0, 1]",
                                                           station_id, s.cloud_fraction, to_iso8601(s.time)));
        }
        if (s.cn2 && !(*s.cn2 > 0.0)) {
            throw Error(ErrorCode::ValueError, fmt::format("'{}': non-positive C_n^2 at {}", station_id,
                                                           to_iso8601(s.time)));
        }
        if (i > 0 && s.time <= samples[i - 1].time) {
            throw Error(ErrorCode::TimeOrderError,
                        fmt::format("'{}': sample {} is not after {}", station_id, to_iso8601(s.time),
                                    to_iso8601(samples[i - 1].time)));
        }
    }
}

GridSeries parse_grid_series(std::string_view text, std::string_view source) {
    GridSeries grid = parse_grid_text(text, source);
    for (const auto& frame : grid.frames) {
        for (std::size_t k = 0; k < frame.values.size(); ++k) {
            if (!valid_cloud_value(frame.values[k])) {
                throw Error(ErrorCode::ValueError,
                            fmt::format("{}: frame {} cell ({}, {}) has value {} outside {{0,2}} or [0,1]", source,
                                        to_iso8601(frame.time), k / grid.layout.n_cols, k % grid.layout.n_cols,
                                        frame.values[k]));
            }
        }
    }
    return grid;
}

GridSeries load_grid_series(const std::string& path) { return parse_grid_series(read_file(path), path); }

TurbulenceMap parse_turbulence_map(std::string_view text, std::string_view source) {
    GridSeries grid = parse_grid_text(text, source);
    if (grid.frames.size() != 1) {
        throw Error(ErrorCode::SchemaError,
                    fmt::format("{}: turbulence map needs exactly one frame, found {}", source, grid.frames.size()));
    }
    for (double v : grid.frames.front().values) {
        if (!(v > 0.0)) {
            throw Error(ErrorCode::ValueError, fmt::format("{}: turbulence value {} is not positive", source, v));
        }
    }
    return TurbulenceMap{grid.layout, std::move(grid.frames.front().values)};
}

TurbulenceMap load_turbulence_map(const std::string& path) { return parse_turbulence_map(read_file(path), path); }

std::string format_grid_series(const GridSeries& grid) {
    const auto& l = grid.layout;
    std::string out = fmt::format("GRID {} {} {} {} {}\n", l.origin_lat, l.origin_lon, l.cell_size, l.n_rows, l.n_cols);
    for (const auto& frame : grid.frames) {
        out += "FRAME " + to_iso8601(frame.time) + "\n";
        for (std::size_t r = 0; r < l.n_rows; ++r) {
            for (std::size_t c = 0; c < l.n_cols; ++c) {
                if (c > 0) {
                    out += ' ';
                }
                out += fmt::format("{}", frame.at(l, r, c));
            }
            out += '\n';
        }
    }
    return out;
}

BoxExtent box_extent(double latitude, double box_km) {
    const double km_per_degree = kMeanEarthRadiusKm * std::numbers::pi / 180.0;
    const double half_lat = 0.5 * box_km / km_per_degree;
    return BoxExtent{half_lat, half_lat / std::cos(latitude * std::numbers::pi / 180.0)};
}

std::vector<std::size_t> cells_in_box(const GridLayout& layout, const orbit::GeodeticSite& site, double box_km) {
    if (!(box_km > 0.0)) {
        throw Error(ErrorCode::DomainError, fmt::format("bounding box size {} km must be positive", box_km));
    }
    require_coverage(layout, site);
    const BoxExtent box = box_extent(site.latitude, box_km);
    const double south = site.latitude - box.half_lat;
    const double north = site.latitude + box.half_lat;
    const double west = site.longitude - box.half_lon;
    const double east = site.longitude + box.half_lon;
    // Row/column candidate ranges from the box edges, widened by one cell to
    // absorb rounding; the exact center test below decides membership.
    const auto index_range = [](double lo, double hi, double origin, double cell, std::size_t n) {
        const double a = std::floor((lo - origin) / cell - 0.5) - 1.0;
        const double b = std::ceil((hi - origin) / cell - 0.5) + 1.0;
        return std::pair<std::size_t, std::size_t>{
            static_cast<std::size_t>(std::max(0.0, a)),
            static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(n - 1)))};
    };
    const auto [r0, r1] = index_range(south, north, layout.origin_lat, layout.cell_size, layout.n_rows);
    const auto [c0, c1] = index_range(west, east, layout.origin_lon, layout.cell_size, layout.n_cols);
    std::vector<std::size_t> cells;
    for (std::size_t r = r0; r <= r1; ++r) {
        const double lat = layout.center_lat(r);
        if (std::abs(lat - site.latitude) > box.half_lat) {
            continue;
        }
        for (std::size_t c = c0; c <= c1; ++c) {
            if (std::abs(layout.center_lon(c) - site.longitude) <= box.half_lon) {
                cells.push_back(r * layout.n_cols + c);
            }
        }
    }
    if (cells.empty()) {
        throw Error(ErrorCode::OutOfCoverage,
                    fmt::format("no cell center inside the {} km box around ({}, {})", box_km, site.latitude,
                                site.longitude));
    }
    return cells;
}

WeatherSeries station_cloud_series(const GridSeries& grid, const orbit::GeodeticSite& site, double box_km,
                                   const std::string& station_id) {
    const auto cells = cells_in_box(grid.layout, site, box_km);
    WeatherSeries series;
    series.station_id = station_id;
    series.samples.reserve(grid.frames.size());
    for (const auto& frame : grid.frames) {
        double sum = 0.0;
        for (std::size_t k : cells) {
            sum += cloud_value(frame.values[k]);
        }
        series.samples.push_back({frame.time, sum / static_cast<double>(cells.size()), std::nullopt});
    }
    return series;
}

double station_turbulence(const TurbulenceMap& map, const orbit::GeodeticSite& site) {
    require_coverage(map.layout, site);
    const auto& l = map.layout;
    const std::size_t row = nearest_index(site.latitude, l.origin_lat, l.cell_size, l.n_rows);
    const std::size_t col = nearest_index(site.longitude, l.origin_lon, l.cell_size, l.n_cols);
    return map.values[row * l.n_cols + col];
}

void attach_turbulence(WeatherSeries& series, double cn2) {
    if (!(cn2 > 0.0)) {
        throw Error(ErrorCode::ValueError, fmt::format("C_n^2 {} must be positive", cn2));
    }
    for (auto& s : series.samples) {
        s.cn2 = cn2;
    }
}

WeatherSeries slice(const WeatherSeries& series, const TimeWindow& window) {
    if (window.end < window.start) {
        throw Error(ErrorCode::InvalidWindow, "slice window end precedes start");
    }
    if (!series.covers(window.start) || !series.covers(window.end)) {
        throw Error(ErrorCode::OutOfSpan,
                    fmt::format("'{}' does not cover [{}, {}]", series.station_id, to_iso8601(window.start),
                                to_iso8601(window.end)));
    }
    WeatherSeries out;
    out.station_id = series.station_id;
    WeatherSample head = series.at(window.start);
    head.time = window.start;
    out.samples.push_back(head);
    for (const auto& s : series.samples) {
        if (s.time > window.start && s.time <= window.end) {
            out.samples.push_back(s);
        }
    }
    if (out.samples.back().time < window.end) {
        WeatherSample tail = out.samples.back();
        tail.time = window.end;
        out.samples.push_back(tail);
    }
    return out;
}

bool cflos(const WeatherSeries& series, UtcTime t, double threshold) {
    return series.cloud_fraction_at(t) < threshold;
}

std::vector<WeatherSeries> synth_weather(std::span<const double> cloud_probability, const TimeWindow& span,
                                         Seconds cadence, std::uint64_t seed) {
    if (cadence <= Seconds{0}) {
        throw Error(ErrorCode::DomainError, "synthetic weather cadence must be positive");
    }
    if (span.end < span.start) {
        throw Error(ErrorCode::InvalidWindow, "synthetic weather span end precedes start");
    }
    std::vector<WeatherSeries> out;
    out.reserve(cloud_probability.size());
    for (std::size_t i = 0; i < cloud_probability.size(); ++i) {
        const double p = cloud_probability[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::DomainError, fmt::format("cloud probability {} outside [0, 1]", p));
        }
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 engine(seq);
        WeatherSeries series;
        series.station_id = fmt::format("station_{}", i + 1);
        for (UtcTime t = span.start; t <= span.end; t += cadence) {
            // 53-bit uniform in [0, 1); u < 1 always, so p = 1 is always cloudy.
            const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
            series.samples.push_back({t, u < p ? 1.0 : 0.0, std::nullopt});
        }
        out.push_back(std::move(series));
    }
    return out;
}

void write_weather_csv(const std::string& path, std::span<const WeatherSeries> series) {
    std::vector<std::string> header{"timestamp"};
    for (const auto& s : series) {
        header.push_back(s.station_id);
    }
    CsvWriter csv(path, header);
    if (series.empty()) {
        return;
    }
    for (std::size_t k = 0; k < series.front().samples.size(); ++k) {
        const UtcTime t = series.front().samples[k].time;
        std::vector<std::string> row{to_iso8601(t)};
        for (const auto& s : series) {
            row.push_back(s.covers(t) ? format_general(s.cloud_fraction_at(t)) : std::string{});
        }
        csv.row(row);
    }
}

}  // namespace fsonet::weather
