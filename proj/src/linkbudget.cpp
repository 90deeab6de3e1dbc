#include "fsonet/linkbudget.hpp"

#include "fsonet/error.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

namespace fsonet::link {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw Error(ErrorCode::DomainError, what);
    }
}

}  // namespace

void TerminalSpec::validate() const {
    require(wavelength > 0.0, fmt::format("wavelength {} must be positive", wavelength));
    require(tx_aperture > 0.0 && rx_aperture > 0.0, "apertures must be positive");
    require(efficiency > 0.0 && efficiency <= 1.0, fmt::format("efficiency {} outside (0, 1]", efficiency));
    require(beam_divergence > 0.0, "beam divergence must be positive");
    require(pointing_error >= 0.0, "pointing error must be non-negative");
    require(std::isfinite(tx_power_dbw), "transmit power must be finite");
}

void NoiseSpec::validate() const {
    require(system_temperature > 0.0, "system noise temperature must be positive");
    require(bandwidth > 0.0, "bandwidth must be positive");
}

double NoiseSpec::noise_floor_dbw() const {
    return kBoltzmannDb + 10.0 * std::log10(system_temperature) + 10.0 * std::log10(bandwidth);
}

void LinkEnvironment::validate() const {
    require(zenith_attenuation_db >= 0.0, "zenith attenuation must be non-negative");
    require(link_margin_db >= 0.0, "link margin must be non-negative");
    require(cloud_fraction >= 0.0 && cloud_fraction <= 1.0, "cloud fraction outside [0, 1]");
    require(cn2 > 0.0, "C_n^2 must be positive");
}

double free_space_path_loss(double slant_range, double wavelength) {
    require(slant_range > 0.0 && wavelength > 0.0,
            fmt::format("path loss needs positive range and wavelength (S={}, lambda={})", slant_range, wavelength));
    return 20.0 * std::log10(4.0 * std::numbers::pi * slant_range / wavelength);
}

double antenna_gain(double aperture, double wavelength, double efficiency) {
    require(aperture > 0.0 && wavelength > 0.0 && efficiency > 0.0 && efficiency <= 1.0,
            fmt::format("antenna gain domain: D={}, lambda={}, eta={}", aperture, wavelength, efficiency));
    const double ratio = std::numbers::pi * aperture / wavelength;
    return 10.0 * std::log10(efficiency * ratio * ratio);
}

double pointing_loss(double pointing_error, double beam_divergence) {
    require(beam_divergence > 0.0 && pointing_error >= 0.0,
            fmt::format("pointing loss domain: sigma={}, theta_div={}", pointing_error, beam_divergence));
    const double x = 2.0 * pointing_error / beam_divergence;
    return x * x * 10.0 / std::numbers::ln10;
}

double atmospheric_loss(double zenith_attenuation_db, double elevation_deg) {
    require(elevation_deg > 0.0 && elevation_deg <= 90.0,
            fmt::format("atmospheric loss needs elevation in (0, 90], got {}", elevation_deg));
    require(zenith_attenuation_db >= 0.0, "zenith attenuation must be non-negative");
    return zenith_attenuation_db / std::sin(elevation_deg * std::numbers::pi / 180.0);
}

std::optional<double> cloud_loss(double cloud_fraction, double threshold, double k_cloud_db) {
    if (cloud_fraction >= threshold) {
        return std::nullopt;
    }
    return k_cloud_db * cloud_fraction;
}

double turbulence_loss(double cn2, double cn2_reference, double k_turbulence_db) {
    require(cn2 > 0.0 && cn2_reference > 0.0 && k_turbulence_db >= 0.0,
            fmt::format("turbulence loss domain: cn2={}, ref={}, k={}", cn2, cn2_reference, k_turbulence_db));
    return std::max(0.0, k_turbulence_db * std::log10(cn2 / cn2_reference));
}

double shannon_capacity(double snr_db, double bandwidth) {
    return bandwidth * std::log1p(std::pow(10.0, snr_db / 10.0)) / std::numbers::ln2;
}

LinkResult link_budget(const TerminalSpec& terminal, const NoiseSpec& noise, const LinkEnvironment& env,
                       const orbit::TopocentricState& geometry, const LossModel& model) {
    terminal.validate();
    noise.validate();
    env.validate();

    LinkResult r;
    r.free_space_loss_db = free_space_path_loss(geometry.slant_range, terminal.wavelength);
    r.tx_gain_db = antenna_gain(terminal.tx_aperture, terminal.wavelength, terminal.efficiency);
    r.rx_gain_db = antenna_gain(terminal.rx_aperture, terminal.wavelength, terminal.efficiency);
    r.pointing_loss_db = pointing_loss(terminal.pointing_error, terminal.beam_divergence);
    r.atmospheric_loss_db = atmospheric_loss(env.zenith_attenuation_db, geometry.elevation);
    r.cloud_loss_db = cloud_loss(env.cloud_fraction, model.cloud_threshold, model.k_cloud_db);
    r.turbulence_loss_db = turbulence_loss(env.cn2, model.cn2_reference, model.k_turbulence_db);
    r.link_margin_db = env.link_margin_db;
    if (r.blocked()) {
        r.capacity_bps = 0.0;
        return r;
    }
    const double other = r.pointing_loss_db + r.atmospheric_loss_db + *r.cloud_loss_db + r.turbulence_loss_db +
                         r.link_margin_db;
    const double p_rx = terminal.tx_power_dbw + r.tx_gain_db + r.rx_gain_db - r.free_space_loss_db - other;
    r.received_power_dbw = p_rx;
    r.snr_db = p_rx - noise.noise_floor_dbw();
    r.capacity_bps = shannon_capacity(*r.snr_db, noise.bandwidth);
    return r;
}

double recompose_received_power(const TerminalSpec& terminal, const LinkResult& r) {
    return terminal.tx_power_dbw + r.tx_gain_db + r.rx_gain_db - r.free_space_loss_db -
           (r.pointing_loss_db + r.atmospheric_loss_db + r.cloud_loss_db.value_or(0.0) + r.turbulence_loss_db +
            r.link_margin_db);
}

}  // namespace fsonet::link
