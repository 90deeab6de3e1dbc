#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace fsonet::oracles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMu = 3.986004418e14;
constexpr double kRe = 6378137.0;
constexpr double kInvFlattening = 298.257223563;

using Mat3 = std::array<std::array<double, 3>, 3>;
using V3 = std::array<double, 3>;

V3 mul(const Mat3& m, const V3& v) {
    V3 r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r[i] += m[i][j] * v[j];
        }
    }
    return r;
}

Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

// Meeus' degree form of the IAU 1982 sidereal time polynomial.
double sidereal_angle(std::int64_t unix_seconds) {
    const double jd = static_cast<double>(unix_seconds) / 86400.0 + 2440587.5;
    const double d = jd - 2451545.0;
    const double t = d / 36525.0;
    double deg = 280.46061837 + 360.98564736629 * d + 0.000387933 * t * t - t * t * t / 38710000.0;
    deg = std::fmod(deg, 360.0);
    if (deg < 0.0) {
        deg += 360.0;
    }
    return deg * kPi / 180.0;
}

}  // namespace

std::string OracleReport::describe() const {
    return fmt::format("{}: main={:.12g} oracle={:.12g} |d|={:.3g} rel={:.3g} tol={:.3g}{} -> {}", case_id,
                       main_value, oracle_value, abs_deviation, rel_deviation, tolerance, relative ? " (rel)" : "",
                       pass ? "PASS" : "FAIL");
}

OracleReport compare(std::string case_id, double main_value, double oracle_value, double tolerance, bool relative) {
    OracleReport r;
    r.case_id = std::move(case_id);
    r.main_value = main_value;
    r.oracle_value = oracle_value;
    r.abs_deviation = std::abs(main_value - oracle_value);
    r.rel_deviation = oracle_value != 0.0 ? r.abs_deviation / std::abs(oracle_value) : r.abs_deviation;
    r.tolerance = tolerance;
    r.relative = relative;
    r.pass = (relative ? r.rel_deviation : r.abs_deviation) <= tolerance;
    return r;
}

int checksum_digit(std::string_view line68) {
    int sum = 0;
    for (char c : line68.substr(0, 68)) {
        if (c >= '0' && c <= '9') {
            sum += c - '0';
        } else if (c == '-') {
            sum += 1;
        }
    }
    return sum % 10;
}

std::array<std::string, 2> build_tle(const TleFields& f) {
    std::string l1(68, ' ');
    std::string l2(68, ' ');
    auto put = [](std::string& line, int first_col, const std::string& text) {
        line.replace(static_cast<std::size_t>(first_col - 1), text.size(), text);
    };
    put(l1, 1, "1");
    put(l1, 3, fmt::format("{:05d}", f.satellite_id));
    put(l1, 8, "U");
    put(l1, 10, fmt::format("{:<8}", f.designator));
    put(l1, 19, fmt::format("{:02d}", f.epoch_year));
    put(l1, 21, fmt::format("{:012.8f}", f.epoch_day));
    put(l1, 34, " .00000000");
    put(l1, 45, " 00000-0");
    put(l1, 54, " 00000-0");
    put(l1, 63, "0");
    put(l1, 65, fmt::format("{:4d}", f.element_set));

    put(l2, 1, "2");
    put(l2, 3, fmt::format("{:05d}", f.satellite_id));
    put(l2, 9, fmt::format("{:8.4f}", f.inclination));
    put(l2, 18, fmt::format("{:8.4f}", f.raan));
    put(l2, 27, fmt::format("{:07d}", static_cast<long>(std::lround(f.eccentricity * 1e7))));
    put(l2, 35, fmt::format("{:8.4f}", f.arg_perigee));
    put(l2, 44, fmt::format("{:8.4f}", f.mean_anomaly));
    put(l2, 53, fmt::format("{:11.8f}", f.mean_motion));
    put(l2, 64, fmt::format("{:5d}", f.revolution));

    l1 += static_cast<char>('0' + checksum_digit(l1));
    l2 += static_cast<char>('0' + checksum_digit(l2));
    return {l1, l2};
}

double kepler_bisection(double m, double e, double tolerance) {
    double lo = m - e - 1.0;
    double hi = m + e + 1.0;
    for (int i = 0; i < 400 && hi - lo > tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid - e * std::sin(mid) - m > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double kepler_altitude(double mean_motion_rev_per_day) {
    const double period = 86400.0 / mean_motion_rev_per_day;
    const double a = std::cbrt(kMu * std::pow(period / (2.0 * kPi), 2.0));
    return a - kRe;
}

LookAngles topocentric_by_matrices(const orbit::Vec3& eci, double lat_deg, double lon_deg, double alt_m,
                                   std::int64_t unix_seconds) {
    const V3 ecef = mul(rot_z(sidereal_angle(unix_seconds)), V3{eci.x, eci.y, eci.z});

    const double f = 1.0 / kInvFlattening;
    const double e2 = 2.0 * f - f * f;
    const double phi = lat_deg * kPi / 180.0;
    const double lam = lon_deg * kPi / 180.0;
    const double n = kRe / std::sqrt(1.0 - e2 * std::sin(phi) * std::sin(phi));
    const V3 site{(n + alt_m) * std::cos(phi) * std::cos(lam), (n + alt_m) * std::cos(phi) * std::sin(lam),
                  (n * (1.0 - e2) + alt_m) * std::sin(phi)};

    const Mat3 enu{{{-std::sin(lam), std::cos(lam), 0.0},
                    {-std::sin(phi) * std::cos(lam), -std::sin(phi) * std::sin(lam), std::cos(phi)},
                    {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)}}};
    const V3 d{ecef[0] - site[0], ecef[1] - site[1], ecef[2] - site[2]};
    const V3 local = mul(enu, d);

    LookAngles out;
    out.range = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    out.elevation = std::asin(local[2] / out.range) * 180.0 / kPi;
    double az = std::atan2(local[0], local[1]) * 180.0 / kPi;
    out.azimuth = az < 0.0 ? az + 360.0 : az;
    return out;
}

std::vector<ScanPass> elevation_scan(const orbit::TwoLineElements& tle, const orbit::GeodeticSite& site,
                                     const TimeWindow& window, double min_elevation) {
    std::vector<ScanPass> out;
    std::optional<UtcTime> open;
    UtcTime last_visible{};
    for (UtcTime t = window.start; t <= window.end; t += Seconds{1}) {
        const bool visible = orbit::look_angles(tle, site, t).elevation >= min_elevation;
        if (visible) {
            if (!open) {
                open = t;
            }
            last_visible = t;
        } else if (open) {
            out.push_back({*open, last_visible});
            open.reset();
        }
    }
    if (open) {
        out.push_back({*open, last_visible});
    }
    // A single visible second has no duration.
    std::erase_if(out, [](const ScanPass& p) { return p.los <= p.aos; });
    return out;
}

BufferTotals fine_step_buffer(std::span<const analysis::Contact> contacts, std::int64_t generation_rate,
                              std::int64_t capacity, const TimeWindow& span, std::int64_t initial_fill) {
    BufferTotals b;
    b.fill = initial_fill;
    b.generated = initial_fill;
    for (UtcTime t = span.start; t < span.end; t += Seconds{1}) {
        std::int64_t rate = 0;
        for (const auto& c : contacts) {
            if (c.start <= t && t < c.end) {
                rate = std::max(rate, c.rate_bps);
            }
        }
        b.fill += generation_rate;
        b.generated += generation_rate;
        const std::int64_t sent = std::min(b.fill, rate);
        b.fill -= sent;
        b.downlinked += sent;
        if (b.fill > capacity) {
            b.lost += b.fill - capacity;
            b.fill = capacity;
        }
    }
    return b;
}

double closed_form_outage(std::span<const double> cloud_probability) {
    double product = 1.0;
    for (double p : cloud_probability) {
        product *= p;
    }
    return product;
}

std::vector<std::size_t> box_cells(const Grid& g, double lat, double lon, double box_km) {
    const double km_per_deg = 6371.0088 * kPi / 180.0;
    const double half_lat = box_km / 2.0 / km_per_deg;
    const double half_lon = half_lat / std::cos(lat * kPi / 180.0);
    std::vector<std::size_t> out;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const double clat = g.origin_lat + g.cell * (r + 0.5);
            const double clon = g.origin_lon + g.cell * (c + 0.5);
            if (std::abs(clat - lat) <= half_lat && std::abs(clon - lon) <= half_lon) {
                out.push_back(static_cast<std::size_t>(r * g.cols + c));
            }
        }
    }
    return out;
}

std::size_t nearest_cell(const Grid& g, double lat, double lon) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const double dl = g.origin_lat + g.cell * (r + 0.5) - lat;
            const double dn = g.origin_lon + g.cell * (c + 0.5) - lon;
            const double d = dl * dl + dn * dn;
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::size_t>(r * g.cols + c);
            }
        }
    }
    return best;
}

ChainResult link_chain(const ChainInputs& in) {
    const double db_to_lin = std::log(10.0) / 10.0;
    const auto gain = [&](double d) { return in.efficiency * std::pow(kPi * d / in.wavelength, 2.0); };
    const double spreading = std::pow(in.wavelength / (4.0 * kPi * in.slant_range), 2.0);
    const double pointing = std::exp(-std::pow(2.0 * in.pointing_error / in.beam_divergence, 2.0));
    const double atm_db = in.zenith_attenuation / std::sin(in.elevation_deg * kPi / 180.0);
    const double cloud_db = in.k_cloud * in.cloud_fraction;
    const double turb_db = std::max(0.0, in.k_turbulence * std::log10(in.cn2 / in.cn2_reference));
    const double other = std::exp(-(atm_db + cloud_db + turb_db + in.margin) * db_to_lin);

    const double p_tx_w = std::exp(in.tx_power_dbw * db_to_lin);
    const double p_rx_w = p_tx_w * gain(in.tx_aperture) * gain(in.rx_aperture) * spreading * pointing * other;
    const double noise_w = 1.380649e-23 * in.system_temperature * in.bandwidth;

    ChainResult r;
    r.received_power_dbw = 10.0 * std::log10(p_rx_w);
    r.snr_db = 10.0 * std::log10(p_rx_w / noise_w);
    r.capacity_bps = in.bandwidth * std::log2(1.0 + p_rx_w / noise_w);
    return r;
}

double pearson_raw_sums(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

}  // namespace fsonet::oracles
