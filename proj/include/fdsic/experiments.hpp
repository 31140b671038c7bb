#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fdsic/scenario.hpp"

namespace fdsic {

// ---------------------------------------------------------------------------
// Single Monte Carlo trial: one frame through the full chain, cancelled with
// both the auxiliary-receiver technique and the conventional known-X digital
// cancellation baseline.
// ---------------------------------------------------------------------------

struct TrialSpec {
  TransceiverConfig trx{};
  ChannelModelConfig channel{};
  FrameStructure frame{1, 0, 25};
  bool nonlin_suppression = false;
  bool perfect_channel_knowledge = false;
  double soi_power_dbm = kNegInfDb;  // -inf mutes the signal-of-interest
};

struct TrialResult {
  double residual_power = 0.0;  // mean |Y_dc - S|^2 over data cells, linear
  double conv_residual_power = 0.0;
  RVec residual_per_subcarrier;
  RVec conv_residual_per_subcarrier;
  double si_input_power_dbm = kNegInfDb;
  double received_si_power = 0.0;  // linear, at the ordinary antenna
  bool noise_table_clamped = false;
};

TrialResult run_trial(const TrialSpec& spec, std::uint64_t trial_seed);

// Deterministic parallel map over trial indices; results are aggregated by
// index so the outcome is independent of the worker count.
std::vector<TrialResult> run_trials(const TrialSpec& spec, int n_trials,
                                    std::uint64_t master_seed, int workers);

double mean_residual(const std::vector<TrialResult>& trials, bool conventional = false);
double median_residual(std::vector<TrialResult> trials, bool conventional = false);

// ---------------------------------------------------------------------------
// Residual self-interference measurement with per-impairment decomposition.
// ---------------------------------------------------------------------------

struct RunResult {
  double residual_si_dbm = kNegInfDb;
  double residual_si_median_dbm = kNegInfDb;
  double conventional_dbm = kNegInfDb;
  double noise_floor_dbm = -90.0;
  // leave-one-in contributions (dBm): gaussian, quantization, phase_noise,
  // rx_nonlinearity; difference contributions: est_error, fading
  std::vector<std::pair<std::string, double>> decomposition_dbm;
  int n_trials = 0;
  std::uint64_t seed = 0;
  bool decomposition_consistent = true;  // sum of terms within 0.5 dB of total
};

RunResult measure_residual_si(const ScenarioConfig& scenario, int n_trials,
                              std::uint64_t seed, int workers = 0, bool decompose = true);

RunResult conventional_dc_baseline(const ScenarioConfig& scenario, int n_trials,
                                   std::uint64_t seed, int workers = 0);

// 2 P_tx P_nlos P_pn in dB form; p_nlos_db is the non-LOS channel gain
// relative to the transmit power.
double residual_si_upper_bound(double p_tx_dbm, double p_nlos_db, double p_pn_dbc);

// ---------------------------------------------------------------------------
// Achievable rates.
// ---------------------------------------------------------------------------

struct RateCurves {
  std::vector<double> snr_db;
  std::vector<double> rate_fd;       // proposed technique, bits/s/Hz
  std::vector<double> rate_fd_conv;  // conventional digital cancellation
  std::vector<double> rate_hd;
  double avg_gain_pct = 0.0;
  double avg_gain_conv_pct = 0.0;
};

RateCurves achievable_rates(const ScenarioConfig& scenario, const std::vector<double>& snr_grid_db,
                            int n_trials, std::uint64_t seed, int workers = 0);

// Rate curves from already-measured per-subcarrier residual powers (linear,
// relative to ref_dbm): SINR per subcarrier, expectation over trials, HD
// reference at the quiet noise floor with half the resources.
RateCurves rates_from_residuals(const std::vector<TrialResult>& trials,
                                const std::vector<double>& snr_grid_db, double floor_dbm,
                                double ref_dbm);

}  // namespace fdsic
