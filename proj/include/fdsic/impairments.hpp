#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fdsic/ofdm.hpp"

namespace fdsic {

// ---------------------------------------------------------------------------
// Memoryless polynomial nonlinearity, odd orders only:
//   y_n = sum_m alpha_m * g_n * |g_n|^(m-1)
// ---------------------------------------------------------------------------

struct NonlinearityConfig {
  // (order, coefficient); order must be odd, order 1 is the linear gain.
  std::vector<std::pair<int, Complex>> coefficients{{1, Complex(1.0, 0.0)}};

  Complex alpha(int order) const;
  static NonlinearityConfig third_order(Complex a1, Complex a3);
  static NonlinearityConfig linear() { return third_order({1.0, 0.0}, {0.0, 0.0}); }
};

struct NonlinOutput {
  ComplexSignal output;
  ComplexSignal distortion_only;  // output minus alpha_1 * input
};

NonlinOutput apply_nonlinearity(const ComplexSignal& sig, const NonlinearityConfig& cfg);

// Third-order coefficient such that |a3 g|g|^2|^2 power sits target_dbc below
// the linear component on the given reference signal. target -inf -> 0.
Complex calibrate_alpha3(const ComplexSignal& reference, double target_dbc);

// A third-order stage is fixed in physical units; when the absolute level
// mapped to unit baseband power moves from cal_ref to new_ref the baseband
// coefficient scales by the linear power ratio (3:1 intercept-point slope).
Complex rescale_alpha3(Complex alpha3, double cal_ref_dbm, double new_ref_dbm);

// ---------------------------------------------------------------------------
// Oscillator phase noise.
//
// Free-running oscillators: Wiener process, phi_n = phi_{n-1} + beta with
// Var(beta) = 4 pi^2 fc^2 C Ts.
//
// PLL oscillators: stationary sum of Ornstein-Uhlenbeck components (AR(1)
// with pole decay lambda_i and stationary variance ~ weight_i) plus an
// optional Wiener floor, scaled so the total in-band power of exp(j phi)
// sidebands hits target_inband_power_dbc.
// ---------------------------------------------------------------------------

enum class OscillatorModel { kWiener, kPll };

struct PllPole {
  double f3db_hz = 50.0;  // Lorentzian half-power corner (lambda = 2 pi f3db)
  double weight = 1.0;    // relative stationary variance
};

struct PhaseNoiseConfig {
  OscillatorModel model = OscillatorModel::kPll;
  double carrier_hz = 2.4e9;
  double sample_interval_s = 1.0 / 20e6;
  double oscillator_c = 0.0;  // Wiener quality parameter C = f3db / (pi fc^2)
  std::vector<PllPole> pll_spectrum{{50.0, 1.0}};
  // Total stationary phase variance target (dBc); NaN keeps raw weights.
  double target_inband_power_dbc = -40.0;
};

double wiener_increment_variance(const PhaseNoiseConfig& cfg);

RVec gen_phase_noise(int n, const PhaseNoiseConfig& cfg, std::uint64_t seed);

ComplexSignal apply_phase_noise(const ComplexSignal& sig, const RVec& phi);

// ---------------------------------------------------------------------------
// Receiver Gaussian noise and ADC quantization.
// ---------------------------------------------------------------------------

struct NoiseConfig {
  int adc_bits = 14;
  // receiver input power (dBm) -> total in-band Gaussian noise power (dBm),
  // piecewise-linear, clamped outside the table range. Default follows the
  // NI5791 operating points in a 20 MHz bandwidth.
  std::vector<std::pair<double, double>> noise_power_table{
      {-30.0, -90.0}, {-25.0, -90.0}, {-5.0, -72.0}};
  // ADC full-scale amplitude per I/Q rail; <= 0 selects automatic scaling to
  // the signal rms amplitude plus clip_headroom_db. 12 dB of headroom puts
  // the OFDM clip probability near 4e-8 per sample, keeping the clipping
  // error two orders below the Eq.-style granular quantization noise.
  double adc_full_scale = 0.0;
  double clip_headroom_db = 12.0;
};

double interp_noise_power_dbm(const NoiseConfig& cfg, double input_power_dbm,
                              bool* clamped = nullptr);

struct GaussianNoiseOutput {
  ComplexSignal signal;
  double noise_power_dbm = kNegInfDb;
  bool clamped = false;
};

GaussianNoiseOutput add_gaussian_noise(const ComplexSignal& sig, const NoiseConfig& cfg,
                                       double input_power_dbm, double ref_dbm_at_unit_power,
                                       std::uint64_t seed);

struct QuantizeOutput {
  ComplexSignal signal;
  std::size_t clipped_samples = 0;
  double full_scale = 0.0;
};

// Uniform mid-rise quantization of I and Q with 2^bits levels over
// [-FS, FS]. lna_gain_db amplifies into the ADC and is removed afterwards,
// so the returned signal stays input-referred.
QuantizeOutput quantize(const ComplexSignal& sig, const NoiseConfig& cfg,
                        double lna_gain_db = 0.0);

// Quantization error power of one full-scale complex sample (reference
// power 2 FS^2, i.e. both rails at the clip point): 1 / (12 * 2^(2m-2)).
double quantization_noise_variance(int adc_bits);
double quantization_noise_dbfs(int adc_bits);

// Cascade noise figure with unity-gain stages following the LNA:
//   Nf = N_lna + sum_l (N_l - 1) / lna_power_gain
double overall_noise_figure(double nf_lna, const std::vector<double>& nf_blocks,
                            double lna_power_gain);
double thermal_noise_dbm(double bandwidth_hz);  // kTB at 290 K
double gaussian_noise_power_dbm_analytic(double noise_figure, double bandwidth_hz);

}  // namespace fdsic
