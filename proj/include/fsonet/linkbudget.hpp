#pragma once

#include "fsonet/orbit.hpp"

#include <cmath>
#include <optional>

namespace fsonet::link {

/// 10*log10(k_B) in dBW/K/Hz.
inline const double kBoltzmannDb = 10.0 * std::log10(1.380649e-23);

struct TerminalSpec {
    double tx_power_dbw = 0.0;
    double wavelength = 1550e-9;     // m
    double tx_aperture = 0.1;        // m
    double rx_aperture = 0.4;        // m
    double efficiency = 0.6;         // (0, 1]
    double beam_divergence = 15e-6;  // rad
    double pointing_error = 1e-6;    // rad

    void validate() const;
};

struct NoiseSpec {
    double system_temperature = 500.0;  // K
    double bandwidth = 1e9;             // Hz

    void validate() const;
    /// k_B,dB + 10 log10(T_s / 1 K) + 10 log10(B / 1 Hz), dBW.
    double noise_floor_dbw() const;
};

/// Parameters of the cloud and turbulence penalty rules.
struct LossModel {
    double cloud_threshold = 0.1;   // fraction; at or above blocks the link
    double k_cloud_db = 10.0;       // dB at full cover, applied linearly below threshold
    double cn2_reference = 1e-17;   // m^(-2/3)
    double k_turbulence_db = 3.0;   // dB per decade above reference
};

struct LinkEnvironment {
    double zenith_attenuation_db = 0.5;  // gamma: total zenith-path attenuation
    double cloud_fraction = 0.0;
    double cn2 = 1e-17;
    double link_margin_db = 3.0;

    void validate() const;
};

struct LinkResult {
    double free_space_loss_db = 0.0;
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;
    double pointing_loss_db = 0.0;
    double atmospheric_loss_db = 0.0;
    std::optional<double> cloud_loss_db;  // nullopt: blocked
    double turbulence_loss_db = 0.0;
    double link_margin_db = 0.0;
    std::optional<double> received_power_dbw;  // nullopt when blocked
    std::optional<double> snr_db;              // nullopt when blocked
    double capacity_bps = 0.0;

    bool blocked() const { return !cloud_loss_db.has_value(); }
};

/// 20 log10(4 pi S / lambda).
double free_space_path_loss(double slant_range, double wavelength);

/// 10 log10(eta (pi D / lambda)^2).
double antenna_gain(double aperture, double wavelength, double efficiency);

/// -10 log10(exp(-(2 sigma / theta_div)^2)).
double pointing_loss(double pointing_error, double beam_divergence);

/// gamma / sin(elevation), with gamma the total zenith attenuation in dB.
double atmospheric_loss(double zenith_attenuation_db, double elevation_deg);

/// nullopt (blocked) when cloud_fraction >= threshold, else k_cloud * fraction.
std::optional<double> cloud_loss(double cloud_fraction, double threshold, double k_cloud_db);

/// max(0, k_turb log10(cn2 / cn2_ref)).
double turbulence_loss(double cn2, double cn2_reference, double k_turbulence_db);

/// B log2(1 + 10^(snr_db/10)).
double shannon_capacity(double snr_db, double bandwidth);

LinkResult link_budget(const TerminalSpec& terminal, const NoiseSpec& noise, const LinkEnvironment& env,
                       const orbit::TopocentricState& geometry, const LossModel& model = {});

/// P_rx recomposed from the component fields of a result.
double recompose_received_power(const TerminalSpec& terminal, const LinkResult& result);

}  // namespace fsonet::link
