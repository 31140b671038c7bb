#include "fdsic/impairments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdsic {

// --------------------------------------------------------------------------
// nonlinearity
// --------------------------------------------------------------------------

Complex NonlinearityConfig::alpha(int order) const {
  for (const auto& [m, a] : coefficients)
    if (m == order) return a;
  return {0.0, 0.0};
}

NonlinearityConfig NonlinearityConfig::third_order(Complex a1, Complex a3) {
  NonlinearityConfig cfg;
  cfg.coefficients = {{1, a1}, {3, a3}};
  return cfg;
}

NonlinOutput apply_nonlinearity(const ComplexSignal& sig, const NonlinearityConfig& cfg) {
  Complex a1{0.0, 0.0};
  for (const auto& [order, coeff] : cfg.coefficients) {
    if (order < 1 || order % 2 == 0)
      throw std::invalid_argument("apply_nonlinearity: only odd polynomial orders are allowed");
    if (order == 1) a1 = coeff;
  }
  if (a1 == Complex{0.0, 0.0})
    throw std::invalid_argument("apply_nonlinearity: linear gain alpha_1 must be nonzero");

  NonlinOutput out;
  out.output.sample_rate_hz = sig.sample_rate_hz;
  out.distortion_only.sample_rate_hz = sig.sample_rate_hz;
  out.output.samples = a1 * sig.samples;
  out.distortion_only.samples = CVec::Zero(sig.size());

  for (const auto& [order, coeff] : cfg.coefficients) {
    if (order == 1 || coeff == Complex{0.0, 0.0}) continue;
    // g |g|^(m-1)
    const Eigen::ArrayXd mag2 = sig.samples.array().abs2();
    Eigen::ArrayXd env = mag2;
    for (int p = 3; p < order; p += 2) env *= mag2;  // |g|^(m-1) for odd m
    const CVec term = coeff * (sig.samples.array() * env.cast<Complex>()).matrix();
    out.output.samples += term;
    out.distortion_only.samples += term;
  }
  return out;
}

Complex calibrate_alpha3(const ComplexSignal& reference, double target_dbc) {
  const double p2 = mean_power(reference);
  if (p2 <= 0.0) throw std::invalid_argument("calibrate_alpha3: reference has zero power");
  if (std::isinf(target_dbc) && target_dbc < 0) return {0.0, 0.0};
  // |a3|^2 E|g|^6 / E|g|^2 = 10^(target/10)
  const double p6 =
      reference.samples.array().abs2().pow(3).mean();
  return {std::sqrt(db_to_lin(target_dbc) * p2 / p6), 0.0};
}

Complex rescale_alpha3(Complex alpha3, double cal_ref_dbm, double new_ref_dbm) {
  return alpha3 * db_to_lin(new_ref_dbm - cal_ref_dbm);
}

// --------------------------------------------------------------------------
// phase noise
// --------------------------------------------------------------------------

double wiener_increment_variance(const PhaseNoiseConfig& cfg) {
  return 4.0 * kPi * kPi * cfg.carrier_hz * cfg.carrier_hz * cfg.oscillator_c *
         cfg.sample_interval_s;
}

RVec gen_phase_noise(int n, const PhaseNoiseConfig& cfg, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("gen_phase_noise: n must be positive");
  if (cfg.oscillator_c < 0.0)
    throw std::invalid_argument("gen_phase_noise: oscillator C must be non-negative");

  Rng rng(seed);
  RVec phi = RVec::Zero(n);

  if (cfg.model == OscillatorModel::kWiener) {
    const double sigma = std::sqrt(wiener_increment_variance(cfg));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += sigma * rng.gaussian();
      phi[i] = acc;
    }
    return phi;
  }

  // PLL mode: sum of stationary AR(1) components plus optional Wiener floor.
  const bool has_target = std::isfinite(cfg.target_inband_power_dbc);
  double weight_sum = 0.0;
  for (const auto& pole : cfg.pll_spectrum) {
    if (pole.f3db_hz <= 0.0)
      throw std::invalid_argument("gen_phase_noise: PLL pole corner must be positive");
    weight_sum += pole.weight;
  }
  if (cfg.pll_spectrum.empty()) {
    if (has_target && cfg.oscillator_c == 0.0)
      throw std::invalid_argument("gen_phase_noise: empty pll_spectrum with a power target");
    // noiseless oscillator (plus Wiener floor if C > 0)
  }

  double scale = 1.0;  // stationary variance per unit weight
  if (has_target && weight_sum > 0.0)
    scale = db_to_lin(cfg.target_inband_power_dbc) / weight_sum;

  for (const auto& pole : cfg.pll_spectrum) {
    const double var = pole.weight * scale;
    const double rho = std::exp(-2.0 * kPi * pole.f3db_hz * cfg.sample_interval_s);
    const double innov = std::sqrt(var * (1.0 - rho * rho));
    double x = std::sqrt(var) * rng.gaussian();  // stationary start
    phi[0] += x;
    for (int i = 1; i < n; ++i) {
      x = rho * x + innov * rng.gaussian();
      phi[i] += x;
    }
  }

  if (cfg.oscillator_c > 0.0) {
    const double sigma = std::sqrt(wiener_increment_variance(cfg));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += sigma * rng.gaussian();
      phi[i] += acc;
    }
  }
  return phi;
}

ComplexSignal apply_phase_noise(const ComplexSignal& sig, const RVec& phi) {
  if (sig.size() != phi.size())
    throw std::invalid_argument("apply_phase_noise: length mismatch");
  ComplexSignal out;
  out.sample_rate_hz = sig.sample_rate_hz;
  out.samples.resize(sig.size());
  for (Eigen::Index i = 0; i < sig.samples.size(); ++i)
    out.samples[i] = sig.samples[i] * std::polar(1.0, phi[i]);
  return out;
}

// --------------------------------------------------------------------------
// Gaussian noise
// --------------------------------------------------------------------------

double interp_noise_power_dbm(const NoiseConfig& cfg, double input_power_dbm, bool* clamped) {
  const auto& table = cfg.noise_power_table;
  if (table.empty())
    throw std::invalid_argument("interp_noise_power_dbm: empty noise_power_table");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].first <= table[i - 1].first)
      throw std::invalid_argument("interp_noise_power_dbm: table inputs must increase");
    if (table[i].second < table[i - 1].second)
      throw std::invalid_argument("interp_noise_power_dbm: noise power must be non-decreasing");
  }
  if (clamped) *clamped = false;
  if (input_power_dbm <= table.front().first) {
    if (clamped && input_power_dbm < table.front().first) *clamped = true;
    return table.front().second;
  }
  if (input_power_dbm >= table.back().first) {
    if (clamped && input_power_dbm > table.back().first) *clamped = true;
    return table.back().second;
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (input_power_dbm <= table[i].first) {
      const double t = (input_power_dbm - table[i - 1].first) /
                       (table[i].first - table[i - 1].first);
      return table[i - 1].second + t * (table[i].second - table[i - 1].second);
    }
  }
  return table.back().second;
}

GaussianNoiseOutput add_gaussian_noise(const ComplexSignal& sig, const NoiseConfig& cfg,
                                       double input_power_dbm, double ref_dbm_at_unit_power,
                                       std::uint64_t seed) {
  GaussianNoiseOutput out;
  out.noise_power_dbm = interp_noise_power_dbm(cfg, input_power_dbm, &out.clamped);
  const double var = db_to_lin(out.noise_power_dbm - ref_dbm_at_unit_power);
  const double amp = std::sqrt(var);
  Rng rng(seed);
  out.signal.sample_rate_hz = sig.sample_rate_hz;
  out.signal.samples.resize(sig.size());
  for (Eigen::Index i = 0; i < sig.samples.size(); ++i)
    out.signal.samples[i] = sig.samples[i] + amp * rng.cgaussian();
  return out;
}

// --------------------------------------------------------------------------
// quantization
// --------------------------------------------------------------------------

namespace {

double magnitude_percentile(const CVec& x, double percentile) {
  std::vector<double> mags(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
  const auto pos = static_cast<std::size_t>(
      std::min<double>(percentile / 100.0 * (mags.size() - 1), mags.size() - 1.0));
  std::nth_element(mags.begin(), mags.begin() + pos, mags.end());
  return mags[pos];
}

}  // namespace

QuantizeOutput quantize(const ComplexSignal& sig, const NoiseConfig& cfg, double lna_gain_db) {
  if (cfg.adc_bits < 2) throw std::invalid_argument("quantize: adc_bits must be >= 2");
  QuantizeOutput out;
  out.signal.sample_rate_hz = sig.sample_rate_hz;
  if (sig.size() == 0) return out;

  const double gain = db_to_amp(lna_gain_db);
  CVec scaled = gain * sig.samples;
  const double fs = cfg.adc_full_scale > 0.0 ? cfg.adc_full_scale
                                             : magnitude_percentile(scaled, cfg.clip_percentile);
  out.full_scale = fs;
  if (fs <= 0.0) {  // silent signal: nothing to resolve
    out.signal.samples = sig.samples;
    return out;
  }

  const double levels = std::pow(2.0, cfg.adc_bits);
  const double step = 2.0 * fs / levels;
  const double lo = -levels / 2.0;        // level indices [lo, hi]
  const double hi = levels / 2.0 - 1.0;

  out.signal.samples.resize(sig.size());
  for (Eigen::Index i = 0; i < scaled.size(); ++i) {
    bool clip = false;
    auto q = [&](double v) {
      double idx = std::floor(v / step);
      if (idx < lo) { idx = lo; clip = true; }
      if (idx > hi) { idx = hi; clip = true; }
      return (idx + 0.5) * step;
    };
    const double re = q(scaled[i].real());
    const double im = q(scaled[i].imag());
    if (clip) ++out.clipped_samples;
    out.signal.samples[i] = Complex(re, im) / gain;
  }
  return out;
}

double quantization_noise_variance(int adc_bits) {
  return 1.0 / (12.0 * std::pow(2.0, 2 * adc_bits - 2));
}

double quantization_noise_dbfs(int adc_bits) {
  return lin_to_db(quantization_noise_variance(adc_bits));
}

// --------------------------------------------------------------------------
// noise-figure arithmetic
// --------------------------------------------------------------------------

double overall_noise_figure(double nf_lna, const std::vector<double>& nf_blocks,
                            double lna_power_gain) {
  double nf = nf_lna;
  for (const double n : nf_blocks) nf += (n - 1.0) / lna_power_gain;
  return nf;
}

double thermal_noise_dbm(double bandwidth_hz) {
  return -174.0 + lin_to_db(bandwidth_hz);  // kT at 290 K is -174 dBm/Hz
}

double gaussian_noise_power_dbm_analytic(double noise_figure, double bandwidth_hz) {
  return thermal_noise_dbm(bandwidth_hz) + lin_to_db(noise_figure);
}

}  // namespace fdsic
