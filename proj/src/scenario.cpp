#include "fsonet/scenario.hpp"

#include "fsonet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace fsonet::scenario {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Multiplier for an SI-prefixed unit `base` (e.g. "Hz" -> kHz, MHz...).
std::optional<double> prefixed(std::string_view unit, std::string_view base) {
    if (unit == base) {
        return 1.0;
    }
    if (unit.size() != base.size() + 1 || unit.substr(1) != base) {
        return std::nullopt;
    }
    switch (unit.front()) {
        case 'k': return 1e3;
        case 'M': return 1e6;
        case 'G': return 1e9;
        case 'T': return 1e12;
        default: return std::nullopt;
    }
}

std::optional<double> bits_per_unit(std::string_view unit) {
    for (std::string_view base : {"b", "bit"}) {
        if (auto f = prefixed(unit, base)) {
            return f;
        }
    }
    if (auto f = prefixed(unit, "B")) {
        return 8.0 * *f;
    }
    return std::nullopt;
}

std::optional<double> seconds_per_unit(std::string_view unit) {
    if (unit == "s") return 1.0;
    if (unit == "min") return 60.0;
    if (unit == "h") return 3600.0;
    if (unit == "d" || unit == "day") return 86400.0;
    return std::nullopt;
}

std::optional<double> convert(double v, std::string_view unit, Dimension dim) {
    constexpr double deg = std::numbers::pi / 180.0;
    switch (dim) {
        case Dimension::None:
            return unit.empty() ? std::optional(v) : std::nullopt;
        case Dimension::Length:
            if (unit.empty() || unit == "m") return v;
            if (unit == "km") return v * 1e3;
            if (unit == "cm") return v * 1e-2;
            if (unit == "mm") return v * 1e-3;
            if (unit == "um" || unit == "\xC2\xB5m") return v * 1e-6;
            if (unit == "nm") return v * 1e-9;
            return std::nullopt;
        case Dimension::Angle:
            if (unit.empty() || unit == "deg" || unit == "\xC2\xB0") return v;
            if (unit == "rad") return v / deg;
            if (unit == "mrad") return v * 1e-3 / deg;
            if (unit == "urad" || unit == "\xC2\xB5rad") return v * 1e-6 / deg;
            return std::nullopt;
        case Dimension::SmallAngle:
            if (unit.empty() || unit == "rad") return v;
            if (unit == "mrad") return v * 1e-3;
            if (unit == "urad" || unit == "\xC2\xB5rad") return v * 1e-6;
            if (unit == "nrad") return v * 1e-9;
            if (unit == "deg") return v * deg;
            return std::nullopt;
        case Dimension::PowerDbw:
            if (unit.empty() || unit == "dBW") return v;
            if (unit == "dBm") return v - 30.0;
            if ((unit == "W" || unit == "mW") && v > 0.0) return 10.0 * std::log10(unit == "W" ? v : v * 1e-3);
            return std::nullopt;
        case Dimension::Decibel:
            if (unit.empty() || unit == "dB") return v;
            return std::nullopt;
        case Dimension::Frequency:
            if (unit.empty()) return v;
            if (auto f = prefixed(unit, "Hz")) return v * *f;
            return std::nullopt;
        case Dimension::Temperature:
            if (unit.empty() || unit == "K") return v;
            return std::nullopt;
        case Dimension::DataRate: {
            if (unit.empty()) return v;
            if (auto f = prefixed(unit, "bps")) return v * *f;
            const auto slash = unit.find('/');
            if (slash == std::string_view::npos) return std::nullopt;
            const auto bits = bits_per_unit(unit.substr(0, slash));
            const auto secs = seconds_per_unit(unit.substr(slash + 1));
            if (bits && secs) return v * *bits / *secs;
            return std::nullopt;
        }
        case Dimension::DataVolume:
            if (unit.empty()) return v;
            if (auto f = bits_per_unit(unit)) return v * *f;
            return std::nullopt;
        case Dimension::Duration:
            if (unit.empty()) return v;
            if (auto f = seconds_per_unit(unit)) return v * *f;
            return std::nullopt;
        case Dimension::Fraction:
            if (unit.empty()) return v;
            if (unit == "%") return v / 100.0;
            return std::nullopt;
    }
    return std::nullopt;
}

struct Entry {
    std::string key;
    std::string value;
    int line = 0;  // 0 for command-line overrides
    bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

class Document {
public:
    Document(std::string_view text, std::string_view source) : source_(source) {
        std::istringstream in{std::string(text)};
        std::string raw;
        int number = 0;
        bool in_section = false;
        while (std::getline(in, raw)) {
            ++number;
            std::string_view line = raw;
            const auto hash = line.find('#');
            if (hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty() || line.front() == ';') {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: unterminated section header", source_, number));
                }
                const std::string name{trim(line.substr(1, line.size() - 2))};
                if (name.empty()) {
                    throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: empty section name", source_, number));
                }
                if (find(name) != nullptr) {
                    throw Error(ErrorCode::ConfigError,
                                name.starts_with("station:")
                                    ? fmt::format("{}:{}: duplicate station id '{}'", source_, number, name.substr(8))
                                    : fmt::format("{}:{}: duplicate section [{}]", source_, number, name));
                }
                sections_.push_back({name, number, {}});
                in_section = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: expected 'key = value'", source_, number));
            }
            if (!in_section) {
                throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: key outside any section", source_, number));
            }
            Section* current = &sections_.back();
            const std::string key{trim(line.substr(0, eq))};
            const std::string value{trim(line.substr(eq + 1))};
            if (key.empty()) {
                throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: empty key", source_, number));
            }
            for (const Entry& e : current->entries) {
                if (e.key == key) {
                    throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: [{}] {} given twice (first on line {})",
                                                                    source_, number, current->name, key, e.line));
                }
            }
            current->entries.push_back({key, value, number});
        }
    }

    void apply(const Override& o) {
        Section* s = find(o.section);
        if (s == nullptr) {
            sections_.push_back({o.section, 0, {}});
            s = &sections_.back();
        }
        for (Entry& e : s->entries) {
            if (e.key == o.key) {
                e.value = o.value;
                e.line = 0;
                return;
            }
        }
        s->entries.push_back({o.key, o.value, 0});
    }

    Section* find(std::string_view name) {
        for (Section& s : sections_) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    std::vector<Section>& sections() { return sections_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<Section> sections_;
};

std::string where(const std::string& source, int line) {
    return line > 0 ? fmt::format("{}:{}", source, line) : fmt::format("{}:--set", source);
}

// Typed access to one section; every key must be consumed by finish().
class Reader {
public:
    Reader(Section* section, std::string source, std::string name)
        : section_(section), source_(std::move(source)), name_(std::move(name)) {}

    bool present() const { return section_ != nullptr; }

    std::optional<std::string> text(std::string_view key) {
        Entry* e = entry(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        return e->value;
    }

    std::string require_text(std::string_view key) {
        auto v = text(key);
        if (!v) {
            throw Error(ErrorCode::MissingKey, fmt::format("{}: [{}] requires key '{}'", source_, name_, key));
        }
        return *v;
    }

    std::optional<double> quantity(std::string_view key, Dimension dim) {
        Entry* e = entry(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        try {
            return parse_quantity(e->value, dim);
        } catch (const Error& err) {
            throw Error(err.code(), fmt::format("{}: [{}] {}: {}", where(source_, e->line), name_, key, err.what()));
        }
    }

    double require_quantity(std::string_view key, Dimension dim) {
        require_text(key);
        return *quantity(key, dim);
    }

    std::optional<UtcTime> time(std::string_view key) {
        Entry* e = entry(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        try {
            return parse_iso8601(e->value);
        } catch (const Error& err) {
            throw Error(ErrorCode::ConfigError,
                        fmt::format("{}: [{}] {}: {}", where(source_, e->line), name_, key, err.what()));
        }
    }

    template <typename T>
    T choice(std::string_view key, std::initializer_list<std::pair<std::string_view, T>> options, T fallback) {
        Entry* e = entry(key);
        if (e == nullptr) {
            return fallback;
        }
        for (const auto& [word, value] : options) {
            if (e->value == word) {
                return value;
            }
        }
        throw Error(ErrorCode::ConfigError,
                    fmt::format("{}: [{}] {}: unrecognized value '{}'", where(source_, e->line), name_, key, e->value));
    }

    [[noreturn]] void fail(std::string_view key, const std::string& message) {
        Entry* e = lookup(key);
        throw Error(ErrorCode::ConfigError,
                    fmt::format("{}: [{}] {}: {}", where(source_, e ? e->line : section_line()), name_, key, message));
    }

    void finish() {
        if (section_ == nullptr) {
            return;
        }
        for (const Entry& e : section_->entries) {
            if (!e.used) {
                throw Error(ErrorCode::ConfigError,
                            fmt::format("{}: [{}] unknown key '{}'", where(source_, e.line), name_, e.key));
            }
        }
    }

private:
    int section_line() const { return section_ ? section_->line : 0; }

    Entry* lookup(std::string_view key) {
        if (section_ == nullptr) {
            return nullptr;
        }
        for (Entry& e : section_->entries) {
            if (e.key == key) {
                return &e;
            }
        }
        return nullptr;
    }

    Entry* entry(std::string_view key) {
        Entry* e = lookup(key);
        if (e != nullptr) {
            e->used = true;
        }
        return e;
    }

    Section* section_;
    std::string source_;
    std::string name_;
};

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p{value};
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_range(Reader& r, std::string_view key, double v, double lo, double hi, bool hi_open) {
    if (!(v >= lo && (hi_open ? v < hi : v <= hi))) {
        r.fail(key, fmt::format("{} outside [{}, {}{}", v, lo, hi, hi_open ? ")" : "]"));
    }
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim) {
    text = trim(text);
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || !std::isfinite(v)) {
        throw Error(ErrorCode::ValueError, fmt::format("'{}' is not a number", text));
    }
    const std::string_view unit = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    const auto converted = convert(v, unit, dim);
    if (!converted) {
        throw Error(ErrorCode::UnitError, fmt::format("unit '{}' not accepted in '{}'", unit, text));
    }
    return *converted;
}

const GroundStation& Scenario::station(std::string_view id) const { return stations[station_index(id)]; }

std::size_t Scenario::station_index(std::string_view id) const {
    for (std::size_t i = 0; i < stations.size(); ++i) {
        if (stations[i].id == id) {
            return i;
        }
    }
    throw Error(ErrorCode::MissingKey, fmt::format("no station '{}'", id));
}

const NetworkConfiguration& Scenario::configuration(std::string_view name) const {
    for (const auto& c : configurations) {
        if (c.name == name) {
            return c;
        }
    }
    throw Error(ErrorCode::MissingKey, fmt::format("no configuration '{}'", name));
}

Override parse_override(std::string_view text) {
    const auto eq = text.find('=');
    const std::string_view path = eq == std::string_view::npos ? text : trim(text.substr(0, eq));
    const auto dot = path.rfind('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot == 0 || dot + 1 == path.size()) {
        throw Error(ErrorCode::ConfigError, fmt::format("override '{}' is not section.key=value", text));
    }
    return {std::string(trim(path.substr(0, dot))), std::string(trim(path.substr(dot + 1))),
            std::string(trim(text.substr(eq + 1)))};
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir,
                        std::span<const Override> overrides, std::string_view source) {
    Document doc(text, source);
    for (const Override& o : overrides) {
        doc.apply(o);
    }
    const std::string& src = doc.source();
    auto reader = [&](const std::string& name) { return Reader(doc.find(name), src, name); };

    Scenario sc;
    sc.source = std::string(source);

    for (const Section& s : doc.sections()) {
        static const std::set<std::string, std::less<>> fixed{"satellite", "noise", "defaults", "simulation",
                                                              "weather"};
        const bool known = fixed.count(s.name) > 0 || s.name.starts_with("station:") || s.name.starts_with("config:");
        if (!known) {
            throw Error(ErrorCode::ConfigError, fmt::format("{}: unknown section [{}]", where(src, s.line), s.name));
        }
    }

    // satellite
    Reader sat = reader("satellite");
    if (!sat.present()) {
        throw Error(ErrorCode::MissingKey, fmt::format("{}: missing section [satellite]", src));
    }
    {
        const std::filesystem::path tle_path = resolve(base_dir, sat.require_text("tle"));
        const auto sets = orbit::parse_tle_file_contents(read_file(tle_path));
        const auto wanted = sat.text("name");
        auto it = sets.begin();
        if (wanted) {
            it = std::find_if(sets.begin(), sets.end(), [&](const auto& t) { return t.name == *wanted; });
        }
        if (it == sets.end()) {
            sat.fail(wanted ? "name" : "tle", fmt::format("no element set found in '{}'", tle_path.string()));
        }
        sc.tle = *it;
    }
    link::TerminalSpec base_terminal;
    base_terminal.tx_power_dbw = sat.quantity("tx_power", Dimension::PowerDbw).value_or(base_terminal.tx_power_dbw);
    base_terminal.wavelength = sat.quantity("wavelength", Dimension::Length).value_or(base_terminal.wavelength);
    base_terminal.tx_aperture = sat.quantity("tx_aperture", Dimension::Length).value_or(base_terminal.tx_aperture);
    base_terminal.efficiency = sat.quantity("efficiency", Dimension::Fraction).value_or(base_terminal.efficiency);
    base_terminal.beam_divergence =
        sat.quantity("beam_divergence", Dimension::SmallAngle).value_or(base_terminal.beam_divergence);
    base_terminal.pointing_error =
        sat.quantity("pointing_error", Dimension::SmallAngle).value_or(base_terminal.pointing_error);
    sc.generation_rate_bps = sat.quantity("generation_rate", Dimension::DataRate).value_or(0.0);
    sc.buffer_capacity_bits = sat.quantity("buffer_capacity", Dimension::DataVolume).value_or(0.0);
    sc.c_max_bps = sat.quantity("c_max", Dimension::DataRate).value_or(sc.c_max_bps);
    if (sc.generation_rate_bps < 0.0) sat.fail("generation_rate", "must be non-negative");
    if (sc.buffer_capacity_bits < 0.0) sat.fail("buffer_capacity", "must be non-negative");
    if (!(sc.c_max_bps > 0.0)) sat.fail("c_max", "must be positive");
    sat.finish();

    Reader noise = reader("noise");
    sc.noise.system_temperature =
        noise.quantity("system_temperature", Dimension::Temperature).value_or(sc.noise.system_temperature);
    sc.noise.bandwidth = noise.quantity("bandwidth", Dimension::Frequency).value_or(sc.noise.bandwidth);
    noise.finish();
    sc.noise.validate();

    Reader defaults = reader("defaults");
    link::LinkEnvironment base_env;
    const double default_mask = defaults.quantity("min_elevation", Dimension::Angle).value_or(10.0);
    check_range(defaults, "min_elevation", default_mask, 0.0, 90.0, true);
    const double default_box_km = defaults.quantity("box_size", Dimension::Length).value_or(20e3) / 1e3;
    base_env.zenith_attenuation_db =
        defaults.quantity("zenith_attenuation", Dimension::Decibel).value_or(base_env.zenith_attenuation_db);
    base_env.link_margin_db = defaults.quantity("link_margin", Dimension::Decibel).value_or(base_env.link_margin_db);
    base_env.cn2 = defaults.quantity("cn2", Dimension::None).value_or(base_env.cn2);
    const double large_rx = defaults.quantity("large_rx_aperture", Dimension::Length).value_or(kLargeRxAperture);
    const double mobile_rx = defaults.quantity("mobile_rx_aperture", Dimension::Length).value_or(kMobileRxAperture);
    defaults.finish();

    Reader sim = reader("simulation");
    if (!sim.present()) {
        throw Error(ErrorCode::MissingKey, fmt::format("{}: missing section [simulation]", src));
    }
    const auto start = sim.time("start");
    const auto end = sim.time("end");
    if (!start || !end) {
        sim.require_text(start ? "end" : "start");
    }
    sc.window = {*start, *end};
    if (!(sc.window.start < sc.window.end)) {
        sim.fail("end", "window must be non-empty");
    }
    sc.threshold = sim.quantity("threshold", Dimension::Fraction).value_or(sc.threshold);
    check_range(sim, "threshold", sc.threshold, 0.0, 1.0, false);
    sc.normalize_largest = sim.choice<bool>("normalize", {{"largest", true}, {"none", false}}, true);
    const double cadence = sim.quantity("availability_cadence", Dimension::Duration).value_or(15 * 60.0);
    if (!(cadence >= 1.0) || cadence != std::floor(cadence)) {
        sim.fail("availability_cadence", "must be a positive whole number of seconds");
    }
    sc.availability_cadence = Seconds{static_cast<std::int64_t>(cadence)};
    sc.loss.cloud_threshold = sc.threshold;
    sc.loss.k_cloud_db = sim.quantity("k_cloud", Dimension::Decibel).value_or(sc.loss.k_cloud_db);
    sc.loss.cn2_reference = sim.quantity("cn2_reference", Dimension::None).value_or(sc.loss.cn2_reference);
    sc.loss.k_turbulence_db = sim.quantity("k_turbulence", Dimension::Decibel).value_or(sc.loss.k_turbulence_db);
    sim.finish();

    Reader wx = reader("weather");
    sc.weather.kind = wx.choice<WeatherSource::Kind>(
        "source", {{"synthetic", WeatherSource::Kind::Synthetic}, {"grid", WeatherSource::Kind::Grid}},
        WeatherSource::Kind::Synthetic);
    if (auto seed = wx.text("seed")) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(seed->data(), seed->data() + seed->size(), v);
        if (ec != std::errc{} || ptr != seed->data() + seed->size()) {
            wx.fail("seed", fmt::format("'{}' is not an unsigned integer", *seed));
        }
        sc.weather.seed = v;
    }
    sc.weather.span = {wx.time("start").value_or(sc.window.start), wx.time("end").value_or(sc.window.end)};
    const double wx_cadence = wx.quantity("cadence", Dimension::Duration).value_or(15 * 60.0);
    if (!(wx_cadence >= 1.0) || wx_cadence != std::floor(wx_cadence)) {
        wx.fail("cadence", "must be a positive whole number of seconds");
    }
    sc.weather.cadence = Seconds{static_cast<std::int64_t>(wx_cadence)};
    if (auto grid = wx.text("cloud_grid")) {
        sc.weather.cloud_grid = resolve(base_dir, *grid);
    } else if (sc.weather.kind == WeatherSource::Kind::Grid) {
        wx.require_text("cloud_grid");
    }
    if (auto map = wx.text("turbulence_map")) {
        sc.weather.turbulence_map = resolve(base_dir, *map);
    }
    wx.finish();

    for (Section& s : doc.sections()) {
        if (!s.name.starts_with("station:")) {
            continue;
        }
        Reader st(&s, src, s.name);
        GroundStation g;
        g.id = s.name.substr(8);
        if (g.id.empty()) {
            throw Error(ErrorCode::ConfigError, fmt::format("{}: empty station id", where(src, s.line)));
        }
        for (const auto& other : sc.stations) {
            if (other.id == g.id) {
                throw Error(ErrorCode::ConfigError, fmt::format("{}: duplicate station id '{}'", where(src, s.line), g.id));
            }
        }
        g.name = st.text("name").value_or(g.id);
        g.site.latitude = st.require_quantity("latitude", Dimension::Angle);
        g.site.longitude = st.require_quantity("longitude", Dimension::Angle);
        g.site.altitude = st.quantity("altitude", Dimension::Length).value_or(0.0);
        check_range(st, "latitude", g.site.latitude, -90.0, 90.0, false);
        check_range(st, "longitude", g.site.longitude, -180.0, 180.0, false);
        g.size_class = st.choice<SizeClass>("size_class", {{"large", SizeClass::Large}, {"mobile", SizeClass::Mobile}},
                                            SizeClass::Mobile);
        g.terminal = base_terminal;
        g.terminal.rx_aperture = st.quantity("rx_aperture", Dimension::Length)
                                     .value_or(g.size_class == SizeClass::Large ? large_rx : mobile_rx);
        g.terminal.pointing_error =
            st.quantity("pointing_error", Dimension::SmallAngle).value_or(g.terminal.pointing_error);
        g.environment = base_env;
        g.environment.zenith_attenuation_db =
            st.quantity("zenith_attenuation", Dimension::Decibel).value_or(g.environment.zenith_attenuation_db);
        g.environment.link_margin_db =
            st.quantity("link_margin", Dimension::Decibel).value_or(g.environment.link_margin_db);
        g.min_elevation = st.quantity("min_elevation", Dimension::Angle).value_or(default_mask);
        check_range(st, "min_elevation", g.min_elevation, 0.0, 90.0, true);
        g.box_km = st.quantity("box_size", Dimension::Length).value_or(default_box_km * 1e3) / 1e3;
        if (!(g.box_km > 0.0)) {
            st.fail("box_size", "must be positive");
        }
        g.cloud_probability = st.quantity("cloud_probability", Dimension::Fraction);
        if (g.cloud_probability) {
            check_range(st, "cloud_probability", *g.cloud_probability, 0.0, 1.0, false);
        }
        g.cn2 = st.quantity("cn2", Dimension::None);
        if (g.cn2 && !(*g.cn2 > 0.0)) {
            st.fail("cn2", "must be positive");
        }
        st.finish();
        try {
            g.terminal.validate();
            g.environment.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, fmt::format("{}: [{}] {}", where(src, s.line), s.name, e.what()));
        }
        sc.stations.push_back(std::move(g));
    }
    if (sc.stations.empty()) {
        throw Error(ErrorCode::MissingKey, fmt::format("{}: no [station:<id>] sections", src));
    }

    for (Section& s : doc.sections()) {
        if (!s.name.starts_with("config:")) {
            continue;
        }
        Reader cf(&s, src, s.name);
        NetworkConfiguration c;
        c.name = s.name.substr(7);
        if (c.name.empty()) {
            throw Error(ErrorCode::ConfigError, fmt::format("{}: empty configuration name", where(src, s.line)));
        }
        c.station_ids = split_list(cf.require_text("stations"));
        if (c.station_ids.empty()) {
            cf.fail("stations", "configuration lists no stations");
        }
        std::set<std::string> seen;
        for (const auto& id : c.station_ids) {
            if (!seen.insert(id).second) {
                cf.fail("stations", fmt::format("station '{}' listed twice", id));
            }
            const bool exists = std::any_of(sc.stations.begin(), sc.stations.end(),
                                            [&](const GroundStation& g) { return g.id == id; });
            if (!exists) {
                cf.fail("stations", fmt::format("unknown station '{}'", id));
            }
        }
        cf.finish();
        sc.configurations.push_back(std::move(c));
    }
    if (sc.configurations.empty()) {
        throw Error(ErrorCode::MissingKey, fmt::format("{}: no [config:<name>] sections", src));
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::span<const Override> overrides) {
    Scenario sc = parse_scenario(read_file(path), path.parent_path(), overrides, path.string());
    sc.source = path;
    return sc;
}

std::vector<weather::WeatherSeries> load_weather(const Scenario& scenario) {
    std::vector<weather::WeatherSeries> out;
    if (scenario.weather.kind == WeatherSource::Kind::Synthetic) {
        std::vector<double> probabilities;
        for (const auto& g : scenario.stations) {
            if (!g.cloud_probability) {
                throw Error(ErrorCode::MissingKey,
                            fmt::format("[station:{}] needs cloud_probability for synthetic weather", g.id));
            }
            probabilities.push_back(*g.cloud_probability);
        }
        out = weather::synth_weather(probabilities, scenario.weather.span, scenario.weather.cadence,
                                     scenario.weather.seed);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].station_id = scenario.stations[i].id;
        }
    } else {
        const weather::GridSeries grid = weather::load_grid_series(scenario.weather.cloud_grid.string());
        for (const auto& g : scenario.stations) {
            out.push_back(weather::station_cloud_series(grid, g.site, g.box_km, g.id));
        }
    }
    std::optional<weather::TurbulenceMap> map;
    if (scenario.weather.turbulence_map) {
        map = weather::load_turbulence_map(scenario.weather.turbulence_map->string());
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const GroundStation& g = scenario.stations[i];
        const double cn2 = g.cn2 ? *g.cn2 : map ? weather::station_turbulence(*map, g.site) : g.environment.cn2;
        weather::attach_turbulence(out[i], cn2);
    }
    return out;
}

JoinedData integrate(const Scenario& scenario, std::vector<weather::WeatherSeries> series) {
    JoinedData joined;
    joined.window = scenario.window;
    const TimeWindow& w = scenario.window;
    for (std::size_t i = 0; i < scenario.stations.size(); ++i) {
        const GroundStation& g = scenario.stations[i];
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const weather::WeatherSeries& s) { return s.station_id == g.id; });
        if (it == series.end() || it->samples.empty()) {
            throw Error(ErrorCode::SpanMismatch, fmt::format("no weather for '{}'; [{}, {}] uncovered", g.id,
                                                             to_iso8601(w.start), to_iso8601(w.end)));
        }
        it->validate();
        if (it->first() > w.start) {
            throw Error(ErrorCode::SpanMismatch,
                        fmt::format("weather for '{}' starts {}; [{}, {}) uncovered", g.id, to_iso8601(it->first()),
                                    to_iso8601(w.start), to_iso8601(std::min(it->first(), w.end))));
        }
        if (it->last() < w.end) {
            throw Error(ErrorCode::SpanMismatch,
                        fmt::format("weather for '{}' ends {}; ({}, {}] uncovered", g.id, to_iso8601(it->last()),
                                    to_iso8601(std::max(it->last(), w.start)), to_iso8601(w.end)));
        }
        StationData d;
        d.station = i;
        d.weather = weather::slice(*it, w);
        d.passes = passes::find_passes(scenario.tle, g.site, w, g.min_elevation, g.id);
        for (const auto& p : d.passes) {
            std::vector<weather::WeatherSample> row;
            row.reserve(p.samples.size());
            for (const auto& s : p.samples) {
                row.push_back(d.weather.at(s.time));
            }
            d.pass_weather.push_back(std::move(row));
        }
        joined.stations.push_back(std::move(d));
    }
    return joined;
}

JoinedData integrate(const Scenario& scenario) { return integrate(scenario, load_weather(scenario)); }

std::vector<analysis::StationLink> station_links(const Scenario& scenario, const JoinedData& joined,
                                                 const NetworkConfiguration& configuration) {
    std::vector<analysis::StationLink> links;
    for (const auto& id : configuration.station_ids) {
        const std::size_t i = scenario.station_index(id);
        const GroundStation& g = scenario.stations[i];
        const StationData& d = joined.stations.at(i);
        links.push_back({g.id, d.passes, &d.weather, g.terminal, g.environment});
    }
    return links;
}

ConfigurationResult evaluate_configuration(const Scenario& scenario, const JoinedData& joined,
                                           const NetworkConfiguration& configuration) {
    ConfigurationResult r;
    r.name = configuration.name;
    r.station_ids = configuration.station_ids;

    std::vector<weather::WeatherSeries> wx;
    for (const auto& id : configuration.station_ids) {
        wx.push_back(joined.stations.at(scenario.station_index(id)).weather);
    }
    r.availability = analysis::availability_series(wx, scenario.threshold, scenario.availability_cadence);

    const auto links = station_links(scenario, joined, configuration);
    r.throughput = analysis::throughput(links, scenario.noise, scenario.loss, scenario.c_max_bps);
    r.pdt_pct = r.throughput.pdt_pct;

    if (scenario.buffer_capacity_bits > 0.0) {
        const auto contacts = analysis::contacts_from(r.throughput.per_pass);
        r.buffer = analysis::buffer_simulate(contacts, std::llround(scenario.generation_rate_bps),
                                             std::llround(scenario.buffer_capacity_bits), joined.window);
    }
    return r;
}

SweepResult run_sweep(const Scenario& scenario, const JoinedData& joined) {
    SweepResult sweep;
    for (const auto& c : scenario.configurations) {
        sweep.configurations.push_back(evaluate_configuration(scenario, joined, c));
    }
    if (scenario.normalize_largest) {
        const ConfigurationResult* largest = nullptr;
        for (const auto& r : sweep.configurations) {
            if (largest == nullptr || r.throughput.max_bits > largest->throughput.max_bits ||
                (r.throughput.max_bits == largest->throughput.max_bits && r.name < largest->name)) {
                largest = &r;
            }
        }
        const double m = largest->throughput.max_bits;
        sweep.normalized_to = largest->name;
        for (auto& r : sweep.configurations) {
            r.pdt_pct = m > 0.0 ? std::optional(100.0 * r.throughput.total_bits / m) : std::nullopt;
        }
    }
    if (joined.stations.size() >= 2) {
        std::vector<weather::WeatherSeries> wx;
        for (const auto& d : joined.stations) {
            wx.push_back(d.weather);
        }
        sweep.correlation = analysis::pearson_cloud_correlation(wx, scenario.availability_cadence);
    }
    return sweep;
}

}  // namespace fsonet::scenario
