#include "fdsic/transceiver.hpp"

#include <stdexcept>

namespace fdsic {

namespace {

// Fixed stream ids keep draws identical when single impairments are toggled.
enum StreamId : std::uint64_t {
  kStreamTxPn = 1,
  kStreamRxPnOrd = 2,
  kStreamRxPnAux = 3,
  kStreamNoiseOrd = 4,
  kStreamNoiseAux = 5,
};

ComplexSignal zeros_like(const ComplexSignal& s) {
  ComplexSignal z;
  z.sample_rate_hz = s.sample_rate_hz;
  z.samples = CVec::Zero(s.size());
  return z;
}

}  // namespace

TransmitOutput transmit(const OfdmGrid& grid, const TransceiverConfig& cfg,
                        std::uint64_t seed) {
  TransmitOutput out;
  ComplexSignal x = ofdm_modulate(grid);

  ComplexSignal rotated = x;
  if (cfg.tx_phase_noise_on) {
    const RVec phi = gen_phase_noise(x.size(), cfg.tx_phase_noise, derive_seed(seed, kStreamTxPn));
    rotated = apply_phase_noise(x, phi);
  }

  ComplexSignal dist = zeros_like(x);
  if (cfg.tx_nonlinearity_on) {
    NonlinearityConfig pa = cfg.tx_pa;
    for (auto& [order, coeff] : pa.coefficients)
      if (order == 3) coeff = rescale_alpha3(coeff, cfg.tx_pa_cal_ref_dbm, cfg.tx_power_dbm);
    auto nl = apply_nonlinearity(rotated, pa);
    dist = nl.distortion_only;
    // alpha_1 is unity in every calibrated configuration here; the linear
    // component stays `rotated`.
  }

  CVec total = rotated.samples + dist.samples;
  const double scale = 1.0 / std::sqrt(mean_power(total));
  out.scale = scale;

  out.y_tx.sample_rate_hz = x.sample_rate_hz;
  out.y_tx.samples = scale * total;
  out.linear.sample_rate_hz = x.sample_rate_hz;
  out.linear.samples = scale * x.samples;
  out.tx_pn_term.sample_rate_hz = x.sample_rate_hz;
  out.tx_pn_term.samples = scale * (rotated.samples - x.samples);
  out.tx_dist_term.sample_rate_hz = x.sample_rate_hz;
  out.tx_dist_term.samples = scale * dist.samples;
  return out;
}

ReceptionResult receive(const TransmitOutput& tx, const ChannelRealization& ch_ord,
                        const AuxChannel& ch_aux, const ComplexSignal* soi,
                        const FrameStructure& frame, const TransceiverConfig& cfg,
                        std::uint64_t seed) {
  const int n_subcarriers = 64;
  const int cp_len = 16;
  const int sps = n_subcarriers + cp_len;
  if (soi && soi->size() != tx.y_tx.size())
    throw std::invalid_argument("receive: soi length mismatch");

  ReceptionResult res;

  // ---- ordinary chain -----------------------------------------------------
  ComplexSignal u_lin = apply_channel(tx.linear, ch_ord, sps);
  ComplexSignal u_txpn = apply_channel(tx.tx_pn_term, ch_ord, sps);
  ComplexSignal u_txd = apply_channel(tx.tx_dist_term, ch_ord, sps);
  ComplexSignal u_ord;
  u_ord.sample_rate_hz = tx.y_tx.sample_rate_hz;
  u_ord.samples = u_lin.samples + u_txpn.samples + u_txd.samples;

  res.ord_input_power_dbm = measure_power_dbm(u_ord, cfg.tx_power_dbm);

  ComplexSignal d_rx = zeros_like(u_ord);
  if (cfg.rx_nonlinearity_on) {
    NonlinearityConfig lna = cfg.rx_lna;
    for (auto& [order, coeff] : lna.coefficients)
      if (order == 3) coeff = rescale_alpha3(coeff, cfg.rx_lna_cal_ref_dbm, cfg.tx_power_dbm);
    d_rx = apply_nonlinearity(u_ord, lna).distortion_only;
  }

  const std::uint64_t rx_pn_seed_ord = derive_seed(seed, kStreamRxPnOrd);
  const std::uint64_t rx_pn_seed_aux =
      cfg.share_pll ? rx_pn_seed_ord : derive_seed(seed, kStreamRxPnAux);

  res.phi_rx_ord = RVec::Zero(u_ord.size());
  res.phi_rx_aux = RVec::Zero(u_ord.size());
  if (cfg.rx_phase_noise_on) {
    res.phi_rx_ord = gen_phase_noise(u_ord.size(), cfg.rx_phase_noise, rx_pn_seed_ord);
    res.phi_rx_aux = cfg.share_pll
                         ? res.phi_rx_ord
                         : gen_phase_noise(u_ord.size(), cfg.rx_phase_noise, rx_pn_seed_aux);
  }

  // v = (SI through channel) + LNA distortion, then the mixer rotation.
  ComplexSignal v;
  v.sample_rate_hz = u_ord.sample_rate_hz;
  v.samples = u_ord.samples + d_rx.samples;
  ComplexSignal rotated = apply_phase_noise(v, res.phi_rx_ord);
  ComplexSignal rx_pn_term;
  rx_pn_term.sample_rate_hz = v.sample_rate_hz;
  rx_pn_term.samples = rotated.samples - v.samples;

  ComplexSignal analog;
  analog.sample_rate_hz = v.sample_rate_hz;
  analog.samples = rotated.samples;
  if (soi) analog.samples += soi->samples;

  ComplexSignal z_ord = zeros_like(analog);
  if (cfg.gaussian_noise_on) {
    auto gn = add_gaussian_noise(analog, cfg.ord_noise, res.ord_input_power_dbm,
                                 cfg.tx_power_dbm, derive_seed(seed, kStreamNoiseOrd));
    z_ord.samples = gn.signal.samples - analog.samples;
    res.ord_noise_dbm = gn.noise_power_dbm;
    res.noise_table_clamped |= gn.clamped;
    analog.samples = gn.signal.samples;
  }

  ComplexSignal q_ord = zeros_like(analog);
  ComplexSignal y_ord_sig = analog;
  if (cfg.quantization_on) {
    auto qz = quantize(analog, cfg.ord_noise);
    q_ord.samples = qz.signal.samples - analog.samples;
    res.ord_clipped = qz.clipped_samples;
    y_ord_sig = qz.signal;
  }

  // ---- auxiliary chain ----------------------------------------------------
  ComplexSignal u_aux = apply_aux_channel(tx.y_tx, ch_aux);
  res.aux_input_power_dbm = measure_power_dbm(u_aux, cfg.tx_power_dbm);

  ComplexSignal aux_rot = apply_phase_noise(u_aux, res.phi_rx_aux);
  ComplexSignal aux_analog = aux_rot;
  if (cfg.gaussian_noise_on) {
    auto gn = add_gaussian_noise(aux_analog, cfg.aux_noise, res.aux_input_power_dbm,
                                 cfg.tx_power_dbm, derive_seed(seed, kStreamNoiseAux));
    res.aux_noise_dbm = gn.noise_power_dbm;
    res.noise_table_clamped |= gn.clamped;
    aux_analog = gn.signal;
  }
  ComplexSignal y_aux_sig = aux_analog;
  if (cfg.quantization_on) {
    auto qz = quantize(aux_analog, cfg.aux_noise);
    res.aux_clipped = qz.clipped_samples;
    y_aux_sig = qz.signal;
  }

  // ---- demodulation and exact term bookkeeping ------------------------------
  auto demod = [&](const ComplexSignal& s) {
    return ofdm_demodulate(s, frame, n_subcarriers, cp_len);
  };
  res.y_ord = demod(y_ord_sig);
  res.y_aux = demod(y_aux_sig);
  res.ground_truth.linear_si = demod(u_lin);
  res.ground_truth.tx_phase_noise = demod(u_txpn);
  res.ground_truth.tx_distortion = demod(u_txd);
  res.ground_truth.rx_distortion = demod(d_rx);
  res.ground_truth.rx_phase_noise = demod(rx_pn_term);
  res.ground_truth.gaussian = demod(z_ord);
  res.ground_truth.quantization = demod(q_ord);
  res.ground_truth.soi = soi ? demod(*soi) : demod(zeros_like(y_ord_sig));
  return res;
}

}  // namespace fdsic
