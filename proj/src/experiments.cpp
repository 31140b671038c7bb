#include "fdsic/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace fdsic {

namespace {

enum TrialStream : std::uint64_t {
  kStreamGrid = 11,
  kStreamChannel = 12,
  kStreamChain = 13,
  kStreamSoi = 14,
};

constexpr int kSubcarriers = 64;
constexpr int kCpLen = 16;

// Columns holding data symbols.
std::vector<int> data_columns(const FrameStructure& frame) {
  std::vector<int> cols;
  const int start = frame.n_training + frame.n_nonlin_training;
  for (int l = start; l < frame.total_symbols(); ++l) cols.push_back(l);
  return cols;
}

CMat take_columns(const CMat& m, int first, int count) {
  return m.middleCols(first, count);
}

// Received signal-of-interest: far-node frame through the same transmitter
// impairments, flat unit far link, muted over the training interval.
ComplexSignal make_soi(const FrameStructure& frame, const TransceiverConfig& trx,
                       double soi_power_dbm, std::uint64_t seed) {
  Rng grid_rng(derive_seed(seed, 1));
  OfdmGrid grid = make_frame_grid(frame, grid_rng, kSubcarriers, kCpLen);
  TransmitOutput far = transmit(grid, trx, derive_seed(seed, 2));
  ComplexSignal soi = far.y_tx;
  const int mute = (frame.n_training + frame.n_nonlin_training) * (kSubcarriers + kCpLen);
  soi.samples.head(mute).setZero();
  soi.samples *= db_to_amp(soi_power_dbm - trx.tx_power_dbm);
  return soi;
}

}  // namespace

TrialResult run_trial(const TrialSpec& spec, std::uint64_t trial_seed) {
  const FrameStructure& frame = spec.frame;
  const int n_sym = frame.total_symbols();
  const int m = frame.n_training;

  Rng grid_rng(derive_seed(trial_seed, kStreamGrid));
  OfdmGrid grid = make_frame_grid(frame, grid_rng, kSubcarriers, kCpLen);

  TransmitOutput tx = transmit(grid, spec.trx, derive_seed(trial_seed, kStreamChain));
  ChannelRealization ch =
      gen_channel(spec.channel, n_sym, derive_seed(trial_seed, kStreamChannel));

  ComplexSignal soi;
  const bool has_soi = std::isfinite(spec.soi_power_dbm);
  if (has_soi)
    soi = make_soi(frame, spec.trx, spec.soi_power_dbm, derive_seed(trial_seed, kStreamSoi));

  ReceptionResult rec = receive(tx, ch, spec.trx.aux_channel, has_soi ? &soi : nullptr, frame,
                                spec.trx, derive_seed(trial_seed, kStreamChain));

  // ---- auxiliary-receiver cancellation -------------------------------------
  ChannelRatioEstimate est;
  const CVec h_aux_freq = spec.trx.aux_channel.freq_response(kSubcarriers);
  if (spec.perfect_channel_knowledge) {
    est.h_hat = ch.freq_response(std::max(0, m - 1), kSubcarriers).cwiseQuotient(h_aux_freq);
    est.n_averaged = m > 0 ? m : 1;
    est.timestamp_symbol = std::max(0, m - 1);
    est.excluded_count.assign(kSubcarriers, 0);
  } else {
    OfdmGrid tr_aux = rec.y_aux;
    tr_aux.symbols = take_columns(rec.y_aux.symbols, 0, m);
    OfdmGrid tr_ord = rec.y_ord;
    tr_ord.symbols = take_columns(rec.y_ord.symbols, 0, m);
    est = estimate_channel_ratio(tr_aux, tr_ord);
  }

  OfdmGrid y_dc = cancel(rec.y_ord, rec.y_aux, est);

  if (spec.nonlin_suppression && frame.n_nonlin_training > 0) {
    const CVec h_ord_hat = est.h_hat.cwiseProduct(h_aux_freq);
    const CMat x_training = spec.perfect_channel_knowledge
                                ? CMat(kSubcarriers, 0)  // no leakage in a perfect estimate
                                : CMat(take_columns(grid.symbols, 0, m));
    NonlinEstimate nl = estimate_alpha3(x_training, grid.symbols.col(m), y_dc.symbols.col(m),
                                        h_ord_hat);
    const auto cols = data_columns(frame);
    OfdmGrid y_dc_data = y_dc;
    y_dc_data.symbols = take_columns(y_dc.symbols, cols.front(), static_cast<int>(cols.size()));
    OfdmGrid x_data = grid;
    x_data.symbols = take_columns(grid.symbols, cols.front(), static_cast<int>(cols.size()));
    OfdmGrid cleaned = reconstruct_and_subtract(y_dc_data, x_data, nl);
    y_dc.symbols.middleCols(cols.front(), cols.size()) = cleaned.symbols;
  }

  // ---- conventional baseline: LS against the known digital signal ----------
  CVec h_conv = CVec::Zero(kSubcarriers);
  for (int l = 0; l < m; ++l)
    h_conv += rec.y_ord.symbols.col(l).cwiseQuotient(grid.symbols.col(l));
  h_conv /= static_cast<double>(std::max(1, m));
  CMat y_conv = rec.y_ord.symbols;
  for (int l = 0; l < n_sym; ++l)
    y_conv.col(l) -= h_conv.cwiseProduct(grid.symbols.col(l));

  // ---- residual over data cells, signal-of-interest removed ----------------
  const auto cols = data_columns(frame);
  TrialResult out;
  out.residual_per_subcarrier = RVec::Zero(kSubcarriers);
  out.conv_residual_per_subcarrier = RVec::Zero(kSubcarriers);
  for (const int l : cols) {
    const CVec soi_col = rec.ground_truth.soi.symbols.col(l);
    out.residual_per_subcarrier += (y_dc.symbols.col(l) - soi_col).cwiseAbs2();
    out.conv_residual_per_subcarrier += (CVec(y_conv.col(l)) - soi_col).cwiseAbs2();
  }
  out.residual_per_subcarrier /= static_cast<double>(cols.size());
  out.conv_residual_per_subcarrier /= static_cast<double>(cols.size());
  out.residual_power = out.residual_per_subcarrier.mean();
  out.conv_residual_power = out.conv_residual_per_subcarrier.mean();

  out.si_input_power_dbm = rec.ord_input_power_dbm;
  out.received_si_power = db_to_lin(rec.ord_input_power_dbm - spec.trx.tx_power_dbm);
  out.noise_table_clamped = rec.noise_table_clamped;
  return out;
}

std::vector<TrialResult> run_trials(const TrialSpec& spec, int n_trials,
                                    std::uint64_t master_seed, int workers) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_trials));

  std::vector<TrialResult> results(n_trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1))
      results[i] = run_trial(spec, derive_seed(master_seed, 1000 + i));
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers - 1; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

double mean_residual(const std::vector<TrialResult>& trials, bool conventional) {
  double acc = 0.0;
  for (const auto& t : trials) acc += conventional ? t.conv_residual_power : t.residual_power;
  return acc / static_cast<double>(trials.size());
}

double median_residual(std::vector<TrialResult> trials, bool conventional) {
  std::vector<double> v(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i)
    v[i] = conventional ? trials[i].conv_residual_power : trials[i].residual_power;
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

namespace {

TrialSpec scenario_spec(const ScenarioConfig& sc) {
  TrialSpec spec;
  spec.trx = sc.transceiver;
  spec.trx.tx_power_dbm = sc.tx_power_dbm;
  spec.channel = sc.channel_config();
  spec.frame = sc.frame;
  spec.nonlin_suppression = sc.nonlin_suppression;
  return spec;
}

TrialSpec with_impairments(TrialSpec spec, bool gaussian, bool quant, bool rx_pn, bool rx_nl) {
  spec.trx.gaussian_noise_on = gaussian;
  spec.trx.quantization_on = quant;
  spec.trx.rx_phase_noise_on = rx_pn;
  spec.trx.rx_nonlinearity_on = rx_nl;
  return spec;
}

TrialSpec statically(TrialSpec spec) {
  spec.channel.doppler_hz = 0.0;
  return spec;
}

}  // namespace

RunResult measure_residual_si(const ScenarioConfig& sc, int n_trials, std::uint64_t seed,
                              int workers, bool decompose) {
  RunResult res;
  res.n_trials = n_trials;
  res.seed = seed;
  res.noise_floor_dbm = sc.hd_noise_floor_dbm();

  const TrialSpec full = scenario_spec(sc);
  const double ref = sc.tx_power_dbm;

  auto to_dbm = [&](double linear) { return lin_to_db(linear) + ref; };

  const auto total_trials = run_trials(full, n_trials, seed, workers);
  res.residual_si_dbm = to_dbm(mean_residual(total_trials));
  res.residual_si_median_dbm = to_dbm(median_residual(total_trials));
  res.conventional_dbm = to_dbm(mean_residual(total_trials, true));

  if (!decompose) return res;

  auto mean_of = [&](const TrialSpec& spec) {
    return mean_residual(run_trials(spec, n_trials, seed, workers));
  };

  TrialSpec base = statically(full);
  base.perfect_channel_knowledge = true;

  TrialSpec gauss = with_impairments(base, true, false, false, false);
  gauss.nonlin_suppression = false;
  TrialSpec quant = with_impairments(base, false, true, false, false);
  quant.nonlin_suppression = false;
  TrialSpec pn = with_impairments(base, false, false, true, false);
  pn.nonlin_suppression = false;
  TrialSpec nl = statically(with_impairments(full, false, false, false, true));

  TrialSpec gqp_perfect = with_impairments(base, true, true, true, false);
  gqp_perfect.nonlin_suppression = false;
  TrialSpec gqp_est = statically(with_impairments(full, true, true, true, false));
  gqp_est.nonlin_suppression = false;
  TrialSpec gqp_fading = with_impairments(full, true, true, true, false);
  gqp_fading.nonlin_suppression = false;

  const double p_gauss = mean_of(gauss);
  const double p_quant = mean_of(quant);
  const double p_pn = mean_of(pn);
  const double p_nl = mean_of(nl);
  const double p_e_perfect = mean_of(gqp_perfect);
  const double p_e_est = mean_of(gqp_est);
  const double p_fading = mean_of(gqp_fading);

  const double p_est_err = std::max(p_e_est - p_e_perfect, 0.0);
  const double p_fad = std::max(p_fading - p_e_est, 0.0);

  res.decomposition_dbm = {
      {"gaussian", to_dbm(p_gauss)},        {"quantization", to_dbm(p_quant)},
      {"phase_noise", to_dbm(p_pn)},        {"rx_nonlinearity", to_dbm(p_nl)},
      {"est_error", to_dbm(p_est_err)},     {"fading", to_dbm(p_fad)},
  };

  if (n_trials >= 200) {
    const double sum = p_gauss + p_quant + p_pn + p_nl + p_est_err + p_fad;
    const double total = db_to_lin(res.residual_si_dbm - ref);
    res.decomposition_consistent = std::abs(lin_to_db(sum / total)) <= 0.5;
  }
  return res;
}

RunResult conventional_dc_baseline(const ScenarioConfig& sc, int n_trials, std::uint64_t seed,
                                   int workers) {
  RunResult res = measure_residual_si(sc, n_trials, seed, workers, false);
  std::swap(res.residual_si_dbm, res.conventional_dbm);
  return res;
}

double residual_si_upper_bound(double p_tx_dbm, double p_nlos_db, double p_pn_dbc) {
  return p_tx_dbm + p_nlos_db + p_pn_dbc + lin_to_db(2.0);
}

RateCurves rates_from_residuals(const std::vector<TrialResult>& trials,
                                const std::vector<double>& snr_grid_db, double floor_dbm,
                                double ref_dbm) {
  if (snr_grid_db.empty())
    throw std::invalid_argument("rates_from_residuals: empty SNR grid");

  RateCurves rc;
  rc.snr_db = snr_grid_db;
  double gain_acc = 0.0, gain_conv_acc = 0.0;
  for (const double s : snr_grid_db) {
    const double soi_sc = db_to_lin(floor_dbm + s - ref_dbm);  // per-subcarrier soi power
    double fd = 0.0, fd_conv = 0.0;
    for (const auto& t : trials) {
      for (int k = 0; k < t.residual_per_subcarrier.size(); ++k) {
        fd += std::log2(1.0 + soi_sc / t.residual_per_subcarrier[k]);
        fd_conv += std::log2(1.0 + soi_sc / t.conv_residual_per_subcarrier[k]);
      }
    }
    const double cells = static_cast<double>(trials.size()) * kSubcarriers;
    fd /= cells;
    fd_conv /= cells;
    const double hd = 0.5 * std::log2(1.0 + db_to_lin(s));
    rc.rate_fd.push_back(fd);
    rc.rate_fd_conv.push_back(fd_conv);
    rc.rate_hd.push_back(hd);
    gain_acc += (fd - hd) / hd;
    gain_conv_acc += (fd_conv - hd) / hd;
  }
  rc.avg_gain_pct = 100.0 * gain_acc / static_cast<double>(snr_grid_db.size());
  rc.avg_gain_conv_pct = 100.0 * gain_conv_acc / static_cast<double>(snr_grid_db.size());
  return rc;
}

RateCurves achievable_rates(const ScenarioConfig& sc, const std::vector<double>& snr_grid_db,
                            int n_trials, std::uint64_t seed, int workers) {
  const auto trials = run_trials(scenario_spec(sc), n_trials, seed, workers);
  return rates_from_residuals(trials, snr_grid_db, sc.hd_noise_floor_dbm(), sc.tx_power_dbm);
}

}  // namespace fdsic
