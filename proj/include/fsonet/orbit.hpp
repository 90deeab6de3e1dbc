#pragma once

#include "fsonet/time.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsonet::orbit {

inline constexpr double kEarthMu = 3.986004418e14;        // m^3/s^2
inline constexpr double kEarthEquatorialRadius = 6378137.0;  // m, WGS-84
inline constexpr double kEarthFlattening = 1.0 / 298.257223563;
inline constexpr double kJ2 = 1.08262668e-3;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Fields in TLE exponent notation (" 12345-4" meaning 0.12345e-4). Stored
/// with their sign characters so a parsed field re-serializes verbatim.
struct PackedExponent {
    char sign = ' ';            // ' ', '+' or '-'
    int mantissa = 0;           // five digits
    char exponent_sign = '-';   // '+' or '-'
    int exponent = 0;           // one digit

    double value() const;
};

/// A parsed two-line element set. Angles are degrees, mean motion is
/// revolutions per day.
struct TwoLineElements {
    std::string name;
    int satellite_id = 0;
    char classification = 'U';
    std::string international_designator;  // 8 columns, verbatim
    int epoch_year = 0;                    // two-digit year as written
    double epoch_day = 0.0;                // fractional day of year, 1-based
    PreciseTime epoch{};
    char mean_motion_dot_sign = ' ';
    double mean_motion_dot = 0.0;          // rev/day^2, magnitude is |value|
    PackedExponent mean_motion_ddot;
    PackedExponent bstar_field;
    double bstar = 0.0;                    // 1/earth radii
    char ephemeris_type = '0';
    int element_set_number = 0;

    double inclination = 0.0;
    double raan = 0.0;
    double eccentricity = 0.0;
    double arg_perigee = 0.0;
    double mean_anomaly = 0.0;
    double mean_motion = 0.0;
    int revolution_number = 0;

    std::array<std::string, 2> element_set_lines;
};

/// Modulo-10 checksum over the first 68 characters: digits add their value,
/// '-' adds one, everything else is ignored.
int tle_checksum(std::string_view line);

/// Parses one element set. Lines may carry a trailing '\r'.
TwoLineElements parse_tle(std::string_view line1, std::string_view line2, std::string_view name = {});

/// Parses a whole TLE file body (2-line or 3-line sets, any mix).
std::vector<TwoLineElements> parse_tle_file_contents(std::string_view contents);
std::vector<TwoLineElements> load_tle_file(const std::string& path);

/// Rebuilds both 69-column lines, checksums included, from the parsed fields.
std::array<std::string, 2> format_tle(const TwoLineElements& tle);

/// Solves Kepler's equation E - e sin E = M by Newton iteration from E0 = M.
double solve_kepler(double mean_anomaly_rad, double eccentricity);

struct StateVector {
    Vec3 position;  // m, earth-centered inertial
    Vec3 velocity;  // m/s
};

struct PropagatorOptions {
    bool j2_secular = true;
};

/// Mean-element state of the orbit at a time offset from epoch: the
/// secularly-advanced angles fed into the Keplerian position.
struct MeanElements {
    double semi_major_axis = 0.0;  // m
    double eccentricity = 0.0;
    double inclination = 0.0;      // rad
    double raan = 0.0;             // rad
    double arg_perigee = 0.0;      // rad
    double mean_anomaly = 0.0;     // rad
};

MeanElements mean_elements_at(const TwoLineElements& tle, double seconds_since_epoch,
                              const PropagatorOptions& options = {});

/// Keplerian propagation from the TLE mean elements with first-order secular
/// J2 drift of RAAN, argument of perigee and mean anomaly.
StateVector propagate(const TwoLineElements& tle, PreciseTime t, const PropagatorOptions& options = {});
inline StateVector propagate(const TwoLineElements& tle, UtcTime t, const PropagatorOptions& options = {}) {
    return propagate(tle, PreciseTime(t), options);
}
StateVector propagate_since_epoch(const TwoLineElements& tle, double seconds_since_epoch,
                                  const PropagatorOptions& options = {});

/// Semi-major axis from the mean motion via Kepler's third law.
double semi_major_axis(const TwoLineElements& tle);

struct GeodeticSite {
    double latitude = 0.0;   // deg
    double longitude = 0.0;  // deg
    double altitude = 0.0;   // m above the WGS-84 ellipsoid

    /// Throws Error(DomainError) when latitude/longitude are out of range.
    void validate() const;
};

struct TopocentricState {
    UtcTime time{};
    double azimuth = 0.0;      // deg in [0, 360), clockwise from north
    double elevation = 0.0;    // deg in [-90, 90]
    double slant_range = 0.0;  // m
};

/// Greenwich Mean Sidereal Time (IAU 1982), radians in [0, 2pi).
double gmst(PreciseTime t);

Vec3 geodetic_to_ecef(const GeodeticSite& site);
Vec3 eci_to_ecef(const Vec3& eci, double gmst_rad);
Vec3 ecef_to_eci(const Vec3& ecef, double gmst_rad);

/// Site-relative azimuth/elevation/range of an earth-fixed position.
TopocentricState ecef_to_topocentric(const Vec3& ecef, const GeodeticSite& site);
TopocentricState eci_to_topocentric(const Vec3& eci, const GeodeticSite& site, UtcTime t);

/// Convenience: propagate and look from the site.
TopocentricState look_angles(const TwoLineElements& tle, const GeodeticSite& site, UtcTime t,
                             const PropagatorOptions& options = {});

}  // namespace fsonet::orbit
