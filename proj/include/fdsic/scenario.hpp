#pragma once

#include <string>

#include "fdsic/cancellation.hpp"

namespace fdsic {

// A named operating point: passive suppression and Rician factor pair,
// transmit power, channel model, frame structure, impairment set.
struct ScenarioConfig {
  std::string name = "scenario2";
  double passive_suppression_db = 45.0;
  double rician_factor_db = 0.0;
  double tx_power_dbm = 20.0;
  ChannelProfile channel_profile = ChannelProfile::kTgnD;
  double doppler_hz = 5.0;
  FrameStructure frame{1, 1, 25};
  bool nonlin_suppression = true;
  TransceiverConfig transceiver{};

  ChannelModelConfig channel_config() const;
  double hd_noise_floor_dbm() const;  // quiet-input Gaussian noise level
};

// Third-order coefficient magnitude giving target_dbc distortion on a
// unit-power OFDM reference (fixed internal reference signal).
double alpha3_for_unit_power_ofdm(double target_dbc);

// Built-in operating points:
//   1: 25 dB passive suppression, K = 20 dB (omnidirectional antennas)
//   2: 45 dB passive suppression, K = 0 dB  (directional + absorber)
//   3: 60 dB passive suppression, K = 0 dB  (reconfigurable antennas)
ScenarioConfig make_scenario(int index, double tx_power_dbm = 20.0);
ScenarioConfig scenario_by_name(const std::string& name, double tx_power_dbm = 20.0);

// Impairment values shared by all built-ins (NI5791-class transceiver):
// -40 dBc in-band phase noise per oscillator, 14-bit ADCs, the default
// Gaussian-noise table, and -45 dBc third-order distortion at the 20 dBm
// operating point (LNA referenced to -5 dBm input).
TransceiverConfig default_transceiver(double tx_power_dbm);

}  // namespace fdsic
