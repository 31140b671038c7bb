#pragma once

#include <cstdint>

#include "fdsic/ofdm.hpp"

namespace fdsic {

enum class ChannelProfile { kTgnB, kTgnC, kTgnD, kCustom };

// Self-interference wireless channel: tapped delay line at the sample
// spacing, exponential power-delay profile, Rician first tap (static LOS +
// diffuse) and Rayleigh remaining taps, diffuse parts evolving with Doppler
// via sum-of-sinusoids (Jakes autocorrelation J0(2 pi fD tau)).
struct ChannelModelConfig {
  ChannelProfile profile = ChannelProfile::kTgnD;
  double max_delay_ns = 390.0;
  double rms_delay_ns = 50.0;
  double rician_factor_db = 0.0;  // LOS power over total diffuse power; -inf -> no LOS
  double total_gain_db = -45.0;   // passive suppression enters here as negative gain
  double doppler_hz = 5.0;
  double tap_spacing_ns = 50.0;
  double symbol_duration_s = 4e-6;
  int n_sinusoids = 32;

  static ChannelModelConfig tgn(ChannelProfile profile, double rician_factor_db,
                                double total_gain_db, double doppler_hz = 5.0);
};

struct ChannelRealization {
  CMat taps;  // n_symbols x n_taps, constant within one OFDM symbol
  double tap_spacing_ns = 50.0;
  double symbol_duration_s = 4e-6;

  int n_symbols() const { return static_cast<int>(taps.rows()); }
  int n_taps() const { return static_cast<int>(taps.cols()); }

  // Zero-padded tap DFT: H_k = sum_d h_d exp(-j 2 pi k d / N).
  CVec freq_response(int symbol, int n_subcarriers) const;

  static ChannelRealization identity(int n_symbols);
};

ChannelRealization gen_channel(const ChannelModelConfig& cfg, int n_symbols,
                               std::uint64_t seed);

// Time-varying FIR with per-symbol taps. With cp_len >= n_taps - 1 the
// result is circular over each OFDM symbol body, so the demodulated grid is
// the element-wise product with freq_response.
ComplexSignal apply_channel(const ComplexSignal& sig, const ChannelRealization& ch,
                            int samples_per_symbol);

// Width of the band over which the tap-autocorrelation magnitude stays at or
// above `threshold` of its zero-offset value; a flat channel returns the full
// 1/tap_spacing bandwidth.
double coherence_bandwidth_hz(const ChannelRealization& ch, double threshold = 0.9);

// Wired tap from the PA output to the auxiliary receiver input. Frequency
// flat by default; ripple_tap adds a small second tap for near-flat tests.
struct AuxChannel {
  Complex gain{1.0, 0.0};
  Complex ripple_tap{0.0, 0.0};

  CVec freq_response(int n_subcarriers) const;
  bool flat() const { return ripple_tap == Complex{0.0, 0.0}; }
};

ComplexSignal apply_aux_channel(const ComplexSignal& sig, const AuxChannel& aux);

}  // namespace fdsic
