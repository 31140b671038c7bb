#include "fdsic/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fdsic {

ChannelModelConfig ChannelModelConfig::tgn(ChannelProfile profile, double rician_factor_db,
                                           double total_gain_db, double doppler_hz) {
  ChannelModelConfig cfg;
  cfg.profile = profile;
  cfg.rician_factor_db = rician_factor_db;
  cfg.total_gain_db = total_gain_db;
  cfg.doppler_hz = doppler_hz;
  switch (profile) {
    case ChannelProfile::kTgnB: cfg.max_delay_ns = 80.0;  cfg.rms_delay_ns = 15.0; break;
    case ChannelProfile::kTgnC: cfg.max_delay_ns = 200.0; cfg.rms_delay_ns = 30.0; break;
    case ChannelProfile::kTgnD: cfg.max_delay_ns = 390.0; cfg.rms_delay_ns = 50.0; break;
    case ChannelProfile::kCustom:
      throw std::invalid_argument("ChannelModelConfig::tgn: custom profile needs explicit delays");
  }
  return cfg;
}

CVec ChannelRealization::freq_response(int symbol, int n_subcarriers) const {
  CVec h = CVec::Zero(n_subcarriers);
  for (int k = 0; k < n_subcarriers; ++k) {
    Complex acc{0.0, 0.0};
    for (int d = 0; d < n_taps(); ++d)
      acc += taps(symbol, d) * std::polar(1.0, -2.0 * kPi * k * d / n_subcarriers);
    h[k] = acc;
  }
  return h;
}

ChannelRealization ChannelRealization::identity(int n_symbols) {
  ChannelRealization ch;
  ch.taps = CMat::Ones(n_symbols, 1);
  return ch;
}

ChannelRealization gen_channel(const ChannelModelConfig& cfg, int n_symbols,
                               std::uint64_t seed) {
  if (n_symbols < 1) throw std::invalid_argument("gen_channel: n_symbols must be >= 1");
  if (cfg.max_delay_ns < 0 || cfg.tap_spacing_ns <= 0 || cfg.rms_delay_ns <= 0)
    throw std::invalid_argument("gen_channel: invalid delay configuration");

  const int n_taps = static_cast<int>(std::ceil(cfg.max_delay_ns / cfg.tap_spacing_ns)) + 1;

  // Exponential PDP over tap delays, normalized to the diffuse power budget.
  RVec pdp(n_taps);
  for (int d = 0; d < n_taps; ++d)
    pdp[d] = std::exp(-(d * cfg.tap_spacing_ns) / cfg.rms_delay_ns);
  pdp /= pdp.sum();

  const double total = db_to_lin(cfg.total_gain_db);
  const double k_lin = std::isinf(cfg.rician_factor_db)
                           ? (cfg.rician_factor_db > 0 ? std::numeric_limits<double>::infinity() : 0.0)
                           : db_to_lin(cfg.rician_factor_db);

  double p_los, p_diffuse;
  if (std::isinf(k_lin)) {
    p_los = total;
    p_diffuse = 0.0;
  } else {
    p_diffuse = total / (1.0 + k_lin);
    p_los = total - p_diffuse;
  }

  Rng rng(seed);
  ChannelRealization ch;
  ch.tap_spacing_ns = cfg.tap_spacing_ns;
  ch.symbol_duration_s = cfg.symbol_duration_s;
  ch.taps = CMat::Zero(n_symbols, n_taps);

  // LOS: deterministic within a realization (antennas are static relative to
  // each other), random phase across realizations.
  const Complex los = std::polar(std::sqrt(p_los), 2.0 * kPi * rng.uniform());
  for (int t = 0; t < n_symbols; ++t) ch.taps(t, 0) = los;

  if (p_diffuse > 0.0) {
    const int ns = cfg.n_sinusoids;
    const double amp = 1.0 / std::sqrt(static_cast<double>(ns));
    for (int d = 0; d < n_taps; ++d) {
      const double sigma = std::sqrt(p_diffuse * pdp[d]);
      // Sum of sinusoids: random arrival angles and phases per tap.
      std::vector<double> omega(ns), theta(ns);
      for (int i = 0; i < ns; ++i) {
        omega[i] = 2.0 * kPi * cfg.doppler_hz * std::cos(2.0 * kPi * rng.uniform());
        theta[i] = 2.0 * kPi * rng.uniform();
      }
      for (int t = 0; t < n_symbols; ++t) {
        const double time = t * cfg.symbol_duration_s;
        Complex acc{0.0, 0.0};
        for (int i = 0; i < ns; ++i) acc += std::polar(amp, omega[i] * time + theta[i]);
        ch.taps(t, d) += sigma * acc;
      }
    }
  }
  return ch;
}

ComplexSignal apply_channel(const ComplexSignal& sig, const ChannelRealization& ch,
                            int samples_per_symbol) {
  if (samples_per_symbol <= 0)
    throw std::invalid_argument("apply_channel: samples_per_symbol must be positive");
  const int n = sig.size();
  const int needed_symbols = (n + samples_per_symbol - 1) / samples_per_symbol;
  if (ch.n_symbols() < needed_symbols)
    throw std::invalid_argument("apply_channel: channel shorter than signal");

  ComplexSignal out;
  out.sample_rate_hz = sig.sample_rate_hz;
  out.samples = CVec::Zero(n);
  const int n_taps = ch.n_taps();
  for (int i = 0; i < n; ++i) {
    const int sym = i / samples_per_symbol;
    Complex acc{0.0, 0.0};
    const int dmax = std::min(n_taps - 1, i);
    for (int d = 0; d <= dmax; ++d) acc += ch.taps(sym, d) * sig.samples[i - d];
    out.samples[i] = acc;
  }
  return out;
}

double coherence_bandwidth_hz(const ChannelRealization& ch, double threshold) {
  if (ch.taps.size() == 0)
    throw std::invalid_argument("coherence_bandwidth_hz: empty realization");

  // Time-averaged tap powers give the spaced-frequency correlation
  // R(df) = sum_d p_d exp(-j 2 pi df tau_d).
  RVec p = ch.taps.array().abs2().colwise().mean();
  const double p0 = p.sum();
  if (p0 <= 0.0) return 0.0;

  const double spacing_s = ch.tap_spacing_ns * 1e-9;
  const double full_band = 1.0 / spacing_s;
  const int steps = 4096;
  for (int i = 1; i <= steps; ++i) {
    const double df = full_band * i / steps;
    Complex r{0.0, 0.0};
    for (int d = 0; d < ch.n_taps(); ++d)
      r += p[d] * std::polar(1.0, -2.0 * kPi * df * d * spacing_s);
    if (std::abs(r) / p0 < threshold) return full_band * (i - 1) / steps;
  }
  return full_band;
}

CVec AuxChannel::freq_response(int n_subcarriers) const {
  CVec h(n_subcarriers);
  for (int k = 0; k < n_subcarriers; ++k)
    h[k] = gain * (Complex{1.0, 0.0} +
                   ripple_tap * std::polar(1.0, -2.0 * kPi * k / n_subcarriers));
  return h;
}

ComplexSignal apply_aux_channel(const ComplexSignal& sig, const AuxChannel& aux) {
  ComplexSignal out;
  out.sample_rate_hz = sig.sample_rate_hz;
  if (aux.flat()) {
    out.samples = aux.gain * sig.samples;
    return out;
  }
  out.samples.resize(sig.size());
  for (Eigen::Index i = 0; i < sig.samples.size(); ++i) {
    Complex acc = sig.samples[i];
    if (i > 0) acc += aux.ripple_tap * sig.samples[i - 1];
    out.samples[i] = aux.gain * acc;
  }
  return out;
}

}  // namespace fdsic
