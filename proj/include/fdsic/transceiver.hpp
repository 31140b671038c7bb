#pragma once

#include "fdsic/channel.hpp"
#include "fdsic/impairments.hpp"

namespace fdsic {

// Full transceiver configuration: transmitter (phase noise then PA), wired
// auxiliary receiver (no LNA, shared-PLL phase noise, Gaussian noise, ADC)
// and ordinary receiver (wireless channel, LNA nonlinearity, shared-PLL phase
// noise, Gaussian noise, ADC). Third-order coefficients are calibrated at
// *_cal_ref_dbm and re-expressed for the actual operating point.
struct TransceiverConfig {
  double tx_power_dbm = 20.0;

  NonlinearityConfig tx_pa = NonlinearityConfig::linear();
  double tx_pa_cal_ref_dbm = 20.0;
  bool tx_nonlinearity_on = true;

  PhaseNoiseConfig tx_phase_noise{};
  bool tx_phase_noise_on = true;

  PhaseNoiseConfig rx_phase_noise{};
  bool rx_phase_noise_on = true;
  bool share_pll = true;

  NonlinearityConfig rx_lna = NonlinearityConfig::linear();
  double rx_lna_cal_ref_dbm = 20.0;
  bool rx_nonlinearity_on = true;

  NoiseConfig ord_noise{};
  NoiseConfig aux_noise{};
  bool gaussian_noise_on = true;
  bool quantization_on = true;

  // Power-splitter tap feeding the auxiliary chain. Default passes the PA
  // output at full level; set_aux_input_dbm pins an absolute input power.
  AuxChannel aux_channel{};

  void set_aux_input_dbm(double aux_input_dbm) {
    aux_channel.gain = db_to_amp(aux_input_dbm - tx_power_dbm);
  }
};

struct TransmitOutput {
  ComplexSignal y_tx;          // scaled to unit mean power (== tx_power_dbm)
  ComplexSignal linear;        // clean modulated component of y_tx
  ComplexSignal tx_pn_term;    // phase-noise increment
  ComplexSignal tx_dist_term;  // PA distortion
  double scale = 1.0;          // normalization applied to reach unit power
};

// y_tx = PA(phase_noise(modulate(grid))), rescaled to unit mean power so the
// absolute bookkeeping reference stays exact per frame.
TransmitOutput transmit(const OfdmGrid& grid, const TransceiverConfig& cfg,
                        std::uint64_t seed);

// Additive decomposition of the ordinary receiver output; the term grids sum
// to y_ord exactly.
struct GroundTruth {
  OfdmGrid linear_si;
  OfdmGrid tx_phase_noise;
  OfdmGrid tx_distortion;
  OfdmGrid rx_distortion;
  OfdmGrid rx_phase_noise;
  OfdmGrid gaussian;
  OfdmGrid quantization;
  OfdmGrid soi;
};

struct ReceptionResult {
  OfdmGrid y_aux;
  OfdmGrid y_ord;
  GroundTruth ground_truth;
  RVec phi_rx_ord;
  RVec phi_rx_aux;
  double ord_input_power_dbm = kNegInfDb;
  double aux_input_power_dbm = kNegInfDb;
  double ord_noise_dbm = kNegInfDb;
  double aux_noise_dbm = kNegInfDb;
  std::size_t ord_clipped = 0;
  std::size_t aux_clipped = 0;
  bool noise_table_clamped = false;
};

// soi, when present, is the received signal-of-interest at the ordinary
// antenna (absolute scale, impairments of the far transmitter included); it
// must be zero over the training interval.
ReceptionResult receive(const TransmitOutput& tx, const ChannelRealization& ch_ord,
                        const AuxChannel& ch_aux, const ComplexSignal* soi,
                        const FrameStructure& frame, const TransceiverConfig& cfg,
                        std::uint64_t seed);

}  // namespace fdsic
