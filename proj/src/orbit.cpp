#include "fsonet/orbit.hpp"

#include "fsonet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace fsonet::orbit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr int kTleLineLength = 69;
constexpr int kKeplerMaxIterations = 50;
constexpr double kKeplerTolerance = 1e-12;

std::string_view strip_cr(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.remove_suffix(1);
    }
    return line;
}

// Columns are 1-based and inclusive, as in the NORAD format description.
std::string_view field(std::string_view line, int first, int last) {
    return line.substr(static_cast<std::size_t>(first - 1), static_cast<std::size_t>(last - first + 1));
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(' ');
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(' ');
    return s.substr(b, e - b + 1);
}

int parse_int_field(std::string_view line, int line_no, int first, int last, bool allow_blank = false) {
    auto text = trim(field(line, first, last));
    if (text.empty()) {
        if (allow_blank) {
            return 0;
        }
        throw TleError(ErrorCode::FormatError, line_no, first, last, "blank integer field");
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw TleError(ErrorCode::FormatError, line_no, first, last, "non-numeric field '" + std::string(text) + "'");
    }
    return value;
}

double parse_double_text(std::string_view text, int line_no, int first, int last) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw TleError(ErrorCode::FormatError, line_no, first, last, "non-numeric field '" + std::string(text) + "'");
    }
    return value;
}

double parse_double_field(std::string_view line, int line_no, int first, int last) {
    return parse_double_text(trim(field(line, first, last)), line_no, first, last);
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

PackedExponent parse_packed(std::string_view line, int line_no, int first) {
    // 8 columns: sign, 5 mantissa digits, exponent sign, exponent digit
    const int last = first + 7;
    const auto text = field(line, first, last);
    PackedExponent out;
    out.sign = text[0];
    out.exponent_sign = text[6];
    std::string_view mantissa = text.substr(1, 5);
    std::string_view exponent = text.substr(7, 1);
    // Some producers blank-pad zero mantissas.
    std::string padded(mantissa);
    std::replace(padded.begin(), padded.end(), ' ', '0');
    if ((out.sign != ' ' && out.sign != '+' && out.sign != '-') || !all_digits(padded) ||
        (out.exponent_sign != '+' && out.exponent_sign != '-' && out.exponent_sign != ' ') || !all_digits(exponent)) {
        throw TleError(ErrorCode::FormatError, line_no, first, last, "malformed exponent field '" + std::string(text) + "'");
    }
    if (out.exponent_sign == ' ') {
        out.exponent_sign = '+';
    }
    out.mantissa = std::stoi(padded);
    out.exponent = exponent[0] - '0';
    return out;
}

std::string format_packed(const PackedExponent& p) {
    return fmt::format("{}{:05d}{}{:d}", p.sign, p.mantissa, p.exponent_sign, p.exponent);
}

void check_line(std::string_view line, int line_no) {
    if (static_cast<int>(line.size()) != kTleLineLength) {
        throw TleError(ErrorCode::FormatError, line_no, 1, static_cast<int>(line.size()),
                       "expected 69 characters, got " + std::to_string(line.size()));
    }
    if (line[0] != static_cast<char>('0' + line_no)) {
        throw TleError(ErrorCode::FormatError, line_no, 1, 1, "line number must be " + std::to_string(line_no));
    }
    const char check = line[68];
    if (check < '0' || check > '9') {
        throw TleError(ErrorCode::FormatError, line_no, 69, 69, "checksum column is not a digit");
    }
    const int expected = tle_checksum(line);
    if (check - '0' != expected) {
        throw TleError(ErrorCode::ChecksumMismatch, line_no, 69, 69,
                       "checksum " + std::string(1, check) + " does not match computed " + std::to_string(expected));
    }
}

PreciseTime epoch_from_tle(int two_digit_year, double day_of_year) {
    using namespace std::chrono;
    const int full_year = two_digit_year < 57 ? 2000 + two_digit_year : 1900 + two_digit_year;
    const sys_days jan1{year{full_year} / January / 1};
    return PreciseTime(jan1) + duration<double>((day_of_year - 1.0) * 86400.0);
}

double wrap_two_pi(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) {
        a += kTwoPi;
    }
    return a;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double PackedExponent::value() const {
    const double magnitude = mantissa * 1e-5 * std::pow(10.0, exponent_sign == '-' ? -exponent : exponent);
    return sign == '-' ? -magnitude : magnitude;
}

int tle_checksum(std::string_view line) {
    int sum = 0;
    const auto n = std::min<std::size_t>(line.size(), 68);
    for (std::size_t i = 0; i < n; ++i) {
        const char c = line[i];
        if (c >= '0' && c <= '9') {
            sum += c - '0';
        } else if (c == '-') {
            sum += 1;
        }
    }
    return sum % 10;
}

TwoLineElements parse_tle(std::string_view line1, std::string_view line2, std::string_view name) {
    line1 = strip_cr(line1);
    line2 = strip_cr(line2);
    check_line(line1, 1);
    check_line(line2, 2);

    TwoLineElements tle;
    tle.name = std::string(trim(strip_cr(name)));

    tle.satellite_id = parse_int_field(line1, 1, 3, 7);
    tle.classification = line1[7];
    tle.international_designator = std::string(field(line1, 10, 17));
    tle.epoch_year = parse_int_field(line1, 1, 19, 20);
    if (!all_digits(field(line1, 21, 23))) {
        throw TleError(ErrorCode::FormatError, 1, 21, 32, "malformed epoch day");
    }
    tle.epoch_day = parse_double_field(line1, 1, 21, 32);
    if (tle.epoch_day < 1.0 || tle.epoch_day >= 367.0) {
        throw TleError(ErrorCode::FormatError, 1, 21, 32, "epoch day out of range");
    }
    tle.epoch = epoch_from_tle(tle.epoch_year, tle.epoch_day);

    const auto ndot = field(line1, 34, 43);
    tle.mean_motion_dot_sign = ndot[0];
    if ((ndot[0] != ' ' && ndot[0] != '-' && ndot[0] != '+') || ndot[1] != '.' || !all_digits(ndot.substr(2))) {
        throw TleError(ErrorCode::FormatError, 1, 34, 43, "malformed mean motion derivative");
    }
    const double ndot_mag = parse_double_text(ndot.substr(1), 1, 34, 43);
    tle.mean_motion_dot = ndot[0] == '-' ? -ndot_mag : ndot_mag;
    tle.mean_motion_ddot = parse_packed(line1, 1, 45);
    tle.bstar_field = parse_packed(line1, 1, 54);
    tle.bstar = tle.bstar_field.value();
    tle.ephemeris_type = line1[62];
    tle.element_set_number = parse_int_field(line1, 1, 65, 68, true);

    const int id2 = parse_int_field(line2, 2, 3, 7);
    if (id2 != tle.satellite_id) {
        throw TleError(ErrorCode::FormatError, 2, 3, 7, "satellite number differs from line 1");
    }
    tle.inclination = parse_double_field(line2, 2, 9, 16);
    tle.raan = parse_double_field(line2, 2, 18, 25);
    const auto ecc = field(line2, 27, 33);
    if (!all_digits(ecc)) {
        throw TleError(ErrorCode::FormatError, 2, 27, 33, "eccentricity must be 7 digits");
    }
    tle.eccentricity = parse_int_field(line2, 2, 27, 33) * 1e-7;
    tle.arg_perigee = parse_double_field(line2, 2, 35, 42);
    tle.mean_anomaly = parse_double_field(line2, 2, 44, 51);
    tle.mean_motion = parse_double_field(line2, 2, 53, 63);
    tle.revolution_number = parse_int_field(line2, 2, 64, 68, true);

    if (tle.inclination < 0.0 || tle.inclination > 180.0) {
        throw TleError(ErrorCode::FormatError, 2, 9, 16, "inclination outside [0, 180]");
    }
    if (tle.mean_motion <= 0.0) {
        throw TleError(ErrorCode::FormatError, 2, 53, 63, "mean motion must be positive");
    }

    tle.element_set_lines = {std::string(line1), std::string(line2)};
    return tle;
}

std::vector<TwoLineElements> parse_tle_file_contents(std::string_view contents) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(contents)};
    for (std::string line; std::getline(in, line);) {
        auto view = strip_cr(line);
        if (!trim(view).empty()) {
            lines.emplace_back(view);
        }
    }
    std::vector<TwoLineElements> out;
    std::size_t i = 0;
    while (i < lines.size()) {
        const bool starts_set = lines[i].size() >= 2 && lines[i][0] == '1' && lines[i][1] == ' ' &&
                                i + 1 < lines.size() && lines[i + 1].size() >= 2 && lines[i + 1][0] == '2';
        if (starts_set) {
            out.push_back(parse_tle(lines[i], lines[i + 1]));
            i += 2;
            continue;
        }
        if (i + 2 >= lines.size()) {
            throw Error(ErrorCode::FormatError, "dangling line in TLE file: '" + lines[i] + "'");
        }
        std::string_view name = lines[i];
        if (name.size() >= 2 && name[0] == '0' && name[1] == ' ') {
            name.remove_prefix(2);
        }
        out.push_back(parse_tle(lines[i + 1], lines[i + 2], name));
        i += 3;
    }
    return out;
}

std::vector<TwoLineElements> load_tle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open TLE file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_tle_file_contents(buffer.str());
}

std::array<std::string, 2> format_tle(const TwoLineElements& tle) {
    const long ndot_digits = std::lround(std::abs(tle.mean_motion_dot) * 1e8);
    std::string l1 = fmt::format("1 {:05d}{} {:<8.8} {:02d}{:012.8f} {}.{:08d} {} {} {} {:4d}", tle.satellite_id,
                                 tle.classification, tle.international_designator, tle.epoch_year, tle.epoch_day,
                                 tle.mean_motion_dot_sign, ndot_digits, format_packed(tle.mean_motion_ddot),
                                 format_packed(tle.bstar_field), tle.ephemeris_type, tle.element_set_number);
    const long ecc_digits = std::lround(tle.eccentricity * 1e7);
    std::string l2 = fmt::format("2 {:05d} {:8.4f} {:8.4f} {:07d} {:8.4f} {:8.4f} {:11.8f}{:5d}", tle.satellite_id,
                                 tle.inclination, tle.raan, ecc_digits, tle.arg_perigee, tle.mean_anomaly,
                                 tle.mean_motion, tle.revolution_number);
    l1.push_back(static_cast<char>('0' + tle_checksum(l1)));
    l2.push_back(static_cast<char>('0' + tle_checksum(l2)));
    return {std::move(l1), std::move(l2)};
}

double solve_kepler(double mean_anomaly_rad, double eccentricity) {
    if (!(eccentricity >= 0.0 && eccentricity < 1.0) || !std::isfinite(mean_anomaly_rad)) {
        throw Error(ErrorCode::EccentricityDomain, fmt::format("eccentricity {} outside [0, 1)", eccentricity));
    }
    // Solve on the reduced anomaly and add the whole revolutions back.
    const double turns = std::round(mean_anomaly_rad / kTwoPi);
    const double m = mean_anomaly_rad - turns * kTwoPi;
    double e_anom = m;
    for (int i = 0; i < kKeplerMaxIterations; ++i) {
        const double residual = e_anom - eccentricity * std::sin(e_anom) - m;
        if (std::abs(residual) < kKeplerTolerance) {
            return e_anom + turns * kTwoPi;
        }
        e_anom -= residual / (1.0 - eccentricity * std::cos(e_anom));
    }
    if (std::abs(e_anom - eccentricity * std::sin(e_anom) - m) < kKeplerTolerance) {
        return e_anom + turns * kTwoPi;
    }
    throw Error(ErrorCode::EccentricityDomain,
                fmt::format("Kepler iteration did not converge (M={}, e={})", mean_anomaly_rad, eccentricity));
}

double semi_major_axis(const TwoLineElements& tle) {
    const double n = tle.mean_motion * kTwoPi / 86400.0;
    return std::cbrt(kEarthMu / (n * n));
}

MeanElements mean_elements_at(const TwoLineElements& tle, double dt, const PropagatorOptions& options) {
    MeanElements el;
    el.semi_major_axis = semi_major_axis(tle);
    el.eccentricity = tle.eccentricity;
    el.inclination = tle.inclination * kDegToRad;
    const double n = tle.mean_motion * kTwoPi / 86400.0;

    double raan_rate = 0.0;
    double argp_rate = 0.0;
    double mean_anomaly_rate = n;
    if (options.j2_secular) {
        const double e2 = el.eccentricity * el.eccentricity;
        const double p = el.semi_major_axis * (1.0 - e2);
        const double k = kJ2 * (kEarthEquatorialRadius / p) * (kEarthEquatorialRadius / p);
        const double cos_i = std::cos(el.inclination);
        raan_rate = -1.5 * n * k * cos_i;
        argp_rate = 0.75 * n * k * (5.0 * cos_i * cos_i - 1.0);
        mean_anomaly_rate = n * (1.0 + 0.75 * k * std::sqrt(1.0 - e2) * (3.0 * cos_i * cos_i - 1.0));
    }
    el.raan = tle.raan * kDegToRad + raan_rate * dt;
    el.arg_perigee = tle.arg_perigee * kDegToRad + argp_rate * dt;
    el.mean_anomaly = tle.mean_anomaly * kDegToRad + mean_anomaly_rate * dt;
    return el;
}

StateVector propagate_since_epoch(const TwoLineElements& tle, double dt, const PropagatorOptions& options) {
    const MeanElements el = mean_elements_at(tle, dt, options);
    const double a = el.semi_major_axis;
    const double e = el.eccentricity;
    const double ecc_anom = solve_kepler(el.mean_anomaly, e);
    const double cos_e = std::cos(ecc_anom);
    const double sin_e = std::sin(ecc_anom);
    const double root = std::sqrt(1.0 - e * e);
    const double n = std::sqrt(kEarthMu / (a * a * a));

    const double xp = a * (cos_e - e);
    const double yp = a * root * sin_e;
    const double denom = 1.0 - e * cos_e;
    const double vxp = -a * n * sin_e / denom;
    const double vyp = a * n * root * cos_e / denom;

    const double co = std::cos(el.raan), so = std::sin(el.raan);
    const double cw = std::cos(el.arg_perigee), sw = std::sin(el.arg_perigee);
    const double ci = std::cos(el.inclination), si = std::sin(el.inclination);
    const Vec3 p{co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si};
    const Vec3 q{-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si};

    return StateVector{xp * p + yp * q, vxp * p + vyp * q};
}

StateVector propagate(const TwoLineElements& tle, PreciseTime t, const PropagatorOptions& options) {
    return propagate_since_epoch(tle, seconds_between(tle.epoch, t), options);
}

void GeodeticSite::validate() const {
    if (!(latitude >= -90.0 && latitude <= 90.0) || !(longitude >= -180.0 && longitude <= 180.0) ||
        !std::isfinite(altitude)) {
        throw Error(ErrorCode::DomainError,
                    fmt::format("site ({}, {}) outside latitude [-90,90] / longitude [-180,180]", latitude, longitude));
    }
}

double gmst(PreciseTime t) {
    const double centuries = (julian_date(t) - 2451545.0) / 36525.0;
    const double seconds = 67310.54841 + (876600.0 * 3600.0 + 8640184.812866) * centuries +
                           0.093104 * centuries * centuries - 6.2e-6 * centuries * centuries * centuries;
    return wrap_two_pi(std::fmod(seconds, 86400.0) * (kTwoPi / 86400.0));
}

Vec3 geodetic_to_ecef(const GeodeticSite& site) {
    const double e2 = kEarthFlattening * (2.0 - kEarthFlattening);
    const double lat = site.latitude * kDegToRad;
    const double lon = site.longitude * kDegToRad;
    const double s = std::sin(lat);
    const double n = kEarthEquatorialRadius / std::sqrt(1.0 - e2 * s * s);
    return {(n + site.altitude) * std::cos(lat) * std::cos(lon), (n + site.altitude) * std::cos(lat) * std::sin(lon),
            (n * (1.0 - e2) + site.altitude) * s};
}

Vec3 eci_to_ecef(const Vec3& eci, double g) {
    const double c = std::cos(g), s = std::sin(g);
    return {c * eci.x + s * eci.y, -s * eci.x + c * eci.y, eci.z};
}

Vec3 ecef_to_eci(const Vec3& ecef, double g) {
    const double c = std::cos(g), s = std::sin(g);
    return {c * ecef.x - s * ecef.y, s * ecef.x + c * ecef.y, ecef.z};
}

TopocentricState ecef_to_topocentric(const Vec3& ecef, const GeodeticSite& site) {
    const Vec3 rel = ecef - geodetic_to_ecef(site);
    const double lat = site.latitude * kDegToRad;
    const double lon = site.longitude * kDegToRad;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);

    const double south = sl * co * rel.x + sl * so * rel.y - cl * rel.z;
    const double east = -so * rel.x + co * rel.y;
    const double zenith = cl * co * rel.x + cl * so * rel.y + sl * rel.z;

    TopocentricState out;
    out.slant_range = rel.norm();
    out.elevation = std::atan2(zenith, std::hypot(south, east)) * kRadToDeg;
    double az = std::atan2(east, -south) * kRadToDeg;
    if (az < 0.0) {
        az += 360.0;
    }
    if (az >= 360.0) {
        az = 0.0;
    }
    out.azimuth = az;
    return out;
}

TopocentricState eci_to_topocentric(const Vec3& eci, const GeodeticSite& site, UtcTime t) {
    TopocentricState out = ecef_to_topocentric(eci_to_ecef(eci, gmst(PreciseTime(t))), site);
    out.time = t;
    return out;
}

TopocentricState look_angles(const TwoLineElements& tle, const GeodeticSite& site, UtcTime t,
                             const PropagatorOptions& options) {
    return eci_to_topocentric(propagate(tle, t, options).position, site, t);
}

}  // namespace fsonet::orbit
