#include "fdsic/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fdsic {

// --------------------------------------------------------------------------
// configuration
// --------------------------------------------------------------------------

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = value;
  }
  if (cfg.has("schema_version") && cfg.get_int("schema_version", kSchemaVersion) != kSchemaVersion)
    throw ConfigError("schema_version: unsupported value " + cfg.values_.at("schema_version"));
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + it->second);
  }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: " + it->second);
  }
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(key + ": not a number: " + item);
    }
  }
  return out;
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// --------------------------------------------------------------------------
// CSV
// --------------------------------------------------------------------------

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), n_cols_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw InvariantError("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw InvariantError("cannot write output file: " + path_);
  out << buffer_;
  closed_ = true;
}

std::string fmt(double value, int precision) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

std::string fmt_int(long long value) { return std::to_string(value); }

// --------------------------------------------------------------------------
// experiments
// --------------------------------------------------------------------------

namespace {

constexpr int kSubcarriers = 64;

std::string out_path(const RunOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / (name + ".csv")).string();
}

void write_meta(const std::string& csv_path, const std::string& experiment,
                const RunOptions& opts) {
  std::ofstream out(csv_path + ".meta");
  out << "experiment = " << experiment << "\n"
      << "seed = " << opts.seed << "\n"
      << "trials = " << opts.trials << "\n"
      << "code_version = " << kVersion << "\n"
      << "schema_version = " << kSchemaVersion << "\n"
      << "config_hash = " << std::hex << fnv1a_hash(opts.config.canonical()) << std::dec << "\n";
}

double combine_dbm(double a_dbm, double b_dbm) {
  return lin_to_db(db_to_lin(a_dbm) + db_to_lin(b_dbm));
}

// ---- fig3: Gaussian vs quantization noise floors -------------------------

std::vector<std::string> run_fig3(const RunOptions& opts) {
  const std::string path = out_path(opts, "fig3");
  CsvWriter csv(path, {"input_power_dbm", "lna_gain_db", "gaussian_noise_dbm",
                       "quantization_noise_dbm", "fd_noise_floor_dbm", "hd_noise_floor_dbm"});
  NoiseConfig noise;
  const double adc_plane_dbm = 0.0;  // full-scale complex power at the ADC
  const double hd_floor = noise.noise_power_table.front().second;
  for (double in = -60.0; in <= 0.01; in += 2.5) {
    const double gain = std::clamp(adc_plane_dbm - in, 0.0, 30.0);
    const double gauss = interp_noise_power_dbm(noise, in);
    const double quant = adc_plane_dbm + quantization_noise_dbfs(noise.adc_bits) - gain;
    csv.row({fmt(in), fmt(gain), fmt(gauss), fmt(quant), fmt(combine_dbm(gauss, quant)),
             fmt(hd_floor)});
  }
  csv.close();
  write_meta(path, "fig3", opts);
  return {path};
}

// ---- fig4: phase-noise-only residual vs non-LOS power --------------------

std::vector<std::string> run_fig4(const RunOptions& opts) {
  const std::string path = out_path(opts, "fig4");
  CsvWriter csv(path, {"nlos_power_dbm", "model", "residual_dbm", "upper_bound_dbm"});
  const double tx_dbm = 20.0;
  const double pn_dbc = -40.0;
  const struct { ChannelProfile profile; const char* name; } models[] = {
      {ChannelProfile::kTgnB, "B"}, {ChannelProfile::kTgnC, "C"}, {ChannelProfile::kTgnD, "D"}};

  int point = 0;
  for (double nlos = -45.0; nlos <= -14.9; nlos += 5.0) {
    for (const auto& m : models) {
      TrialSpec spec;
      spec.trx = default_transceiver(tx_dbm);
      spec.trx.gaussian_noise_on = false;
      spec.trx.quantization_on = false;
      spec.trx.rx_nonlinearity_on = false;
      spec.channel = ChannelModelConfig::tgn(m.profile, kNegInfDb, nlos - tx_dbm, 0.0);
      spec.frame = FrameStructure{1, 0, 10};
      spec.perfect_channel_knowledge = true;
      const auto trials =
          run_trials(spec, opts.trials, derive_seed(opts.seed, 40, point), opts.workers);
      const double residual = lin_to_db(mean_residual(trials)) + tx_dbm;
      csv.row({fmt(nlos), m.name, fmt(residual),
               fmt(residual_si_upper_bound(tx_dbm, nlos - tx_dbm, pn_dbc))});
      ++point;
    }
  }
  csv.close();
  write_meta(path, "fig4", opts);
  return {path};
}

// ---- fig5a: estimation-noise penalty vs training depth -------------------

std::vector<std::string> run_fig5a(const RunOptions& opts) {
  const std::string path = out_path(opts, "fig5a");
  CsvWriter csv(path, {"received_si_dbm", "m_training", "residual_dbm", "perfect_residual_dbm",
                       "degradation_db"});
  const double tx_dbm = 20.0;
  int point = 0;
  for (double rx = -35.0; rx <= -4.9; rx += 5.0) {
    for (const int m : {1, 2, 4, 8}) {
      TrialSpec spec;
      spec.trx = default_transceiver(tx_dbm);
      spec.trx.rx_nonlinearity_on = false;
      spec.channel = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 20.0, rx - tx_dbm, 0.0);
      spec.frame = FrameStructure{m, 0, 25};
      const std::uint64_t seed = derive_seed(opts.seed, 50, point);
      const double est = mean_residual(run_trials(spec, opts.trials, seed, opts.workers));
      TrialSpec perfect = spec;
      perfect.perfect_channel_knowledge = true;
      const double base = mean_residual(run_trials(perfect, opts.trials, seed, opts.workers));
      csv.row({fmt(rx), fmt_int(m), fmt(lin_to_db(est) + tx_dbm), fmt(lin_to_db(base) + tx_dbm),
               fmt(lin_to_db(est / base))});
      ++point;
    }
  }
  csv.close();
  write_meta(path, "fig5a", opts);
  return {path};
}

// ---- fig5b: fading penalty vs frame length --------------------------------

std::vector<std::string> run_fig5b(const RunOptions& opts) {
  const std::string path = out_path(opts, "fig5b");
  CsvWriter csv(path, {"received_si_dbm", "frame_symbols", "residual_dbm", "perfect_residual_dbm",
                       "degradation_db"});
  const double tx_dbm = 20.0;
  const struct { int m; int data; } frames[] = {{2, 48}, {4, 96}, {6, 144}};
  int point = 0;
  for (double rx = -25.0; rx <= -4.9; rx += 5.0) {
    for (const auto& f : frames) {
      TrialSpec spec;
      spec.trx = default_transceiver(tx_dbm);
      spec.trx.rx_nonlinearity_on = false;
      spec.channel = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 20.0, rx - tx_dbm, 5.0);
      spec.frame = FrameStructure{f.m, 0, f.data};
      const std::uint64_t seed = derive_seed(opts.seed, 60, point);
      const double faded = mean_residual(run_trials(spec, opts.trials, seed, opts.workers));
      TrialSpec perfect = spec;
      perfect.perfect_channel_knowledge = true;
      perfect.channel.doppler_hz = 0.0;
      const double base = mean_residual(run_trials(perfect, opts.trials, seed, opts.workers));
      csv.row({fmt(rx), fmt_int(f.m + f.data), fmt(lin_to_db(faded) + tx_dbm),
               fmt(lin_to_db(base) + tx_dbm), fmt(lin_to_db(faded / base))});
      ++point;
    }
  }
  csv.close();
  write_meta(path, "fig5b", opts);
  return {path};
}

// ---- fig6: receiver nonlinearity suppression ------------------------------

std::vector<std::string> run_fig6(const RunOptions& opts) {
  const std::string path = out_path(opts, "fig6");
  CsvWriter csv(path, {"distortion_dbm", "residual_linear_rx_dbm", "residual_no_suppression_dbm",
                       "residual_with_suppression_dbm"});
  const double tx_dbm = 20.0;
  const double rx_dbm = -5.0;  // received self-interference power
  int point = 0;
  for (double dist = -60.0; dist <= -29.9; dist += 5.0) {
    TrialSpec spec;
    spec.trx = default_transceiver(tx_dbm);
    // pin the LNA third-order term so its distortion lands at `dist` dBm
    const double dbc = dist - rx_dbm;
    spec.trx.rx_lna = NonlinearityConfig::third_order(
        {1.0, 0.0}, {alpha3_for_unit_power_ofdm(dbc) / db_to_lin(rx_dbm - tx_dbm), 0.0});
    spec.trx.rx_lna_cal_ref_dbm = tx_dbm;
    spec.channel = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 20.0, rx_dbm - tx_dbm, 5.0);
    const std::uint64_t seed = derive_seed(opts.seed, 70, point);

    TrialSpec linear_rx = spec;
    linear_rx.trx.rx_nonlinearity_on = false;
    linear_rx.frame = FrameStructure{1, 0, 25};
    const double lin = mean_residual(run_trials(linear_rx, opts.trials, seed, opts.workers));

    TrialSpec no_supp = spec;
    no_supp.frame = FrameStructure{1, 0, 25};
    const double raw = mean_residual(run_trials(no_supp, opts.trials, seed, opts.workers));

    TrialSpec supp = spec;
    supp.frame = FrameStructure{1, 1, 25};
    supp.nonlin_suppression = true;
    const double cleaned = mean_residual(run_trials(supp, opts.trials, seed, opts.workers));

    csv.row({fmt(dist), fmt(lin_to_db(lin) + tx_dbm), fmt(lin_to_db(raw) + tx_dbm),
             fmt(lin_to_db(cleaned) + tx_dbm)});
    ++point;
  }
  csv.close();
  write_meta(path, "fig6", opts);
  return {path};
}

// ---- fig7: residual decomposition vs transmit power -----------------------

std::vector<std::string> run_fig7(const RunOptions& opts, int scenario_index) {
  const std::string name = "fig7" + std::string(1, static_cast<char>('a' + scenario_index - 1));
  const std::string path = out_path(opts, name);
  CsvWriter csv(path, {"tx_power_dbm", "total_residual_dbm", "gaussian_dbm", "quantization_dbm",
                       "phase_noise_dbm", "rx_nonlinearity_dbm", "est_error_dbm", "fading_dbm",
                       "conventional_dbm", "hd_floor_dbm"});
  std::vector<double> powers = opts.config.has("tx_power_dbm_list")
                                   ? opts.config.get_double_list("tx_power_dbm_list")
                                   : std::vector<double>{-5, 0, 5, 10, 15, 20};
  int point = 0;
  for (const double p : powers) {
    const ScenarioConfig sc = make_scenario(scenario_index, p);
    const RunResult rr =
        measure_residual_si(sc, opts.trials, derive_seed(opts.seed, 80, scenario_index, point),
                            opts.workers, true);
    if (!rr.decomposition_consistent)
      throw InvariantError(name + ": decomposition does not add up to the total residual");
    std::vector<std::string> cells{fmt(p), fmt(rr.residual_si_dbm)};
    for (const auto& [k, v] : rr.decomposition_dbm) cells.push_back(fmt(v));
    cells.push_back(fmt(rr.conventional_dbm));
    cells.push_back(fmt(rr.noise_floor_dbm));
    csv.row(cells);
    ++point;
  }
  csv.close();
  write_meta(path, name, opts);
  return {path};
}

// ---- fig8 / table1: achievable rates --------------------------------------

std::vector<double> default_snr_grid() {
  std::vector<double> g;
  for (double s = 0.0; s <= 40.01; s += 5.0) g.push_back(s);
  return g;
}

std::vector<std::string> run_fig8(const RunOptions& opts, int scenario_index) {
  const std::string name = "fig8" + std::string(1, static_cast<char>('a' + scenario_index - 1));
  const std::string path = out_path(opts, name);
  CsvWriter csv(path, {"snr_db", "tx_power_dbm", "rate_fd_proposed_bps_hz",
                       "rate_fd_conventional_bps_hz", "rate_hd_bps_hz"});
  const auto grid = default_snr_grid();
  for (const double p : {5.0, 20.0}) {
    const ScenarioConfig sc = make_scenario(scenario_index, p);
    const RateCurves rc = achievable_rates(sc, grid, opts.trials,
                                           derive_seed(opts.seed, 90, scenario_index,
                                                       static_cast<std::uint64_t>(p)),
                                           opts.workers);
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv.row({fmt(grid[i], 1), fmt(p, 1), fmt(rc.rate_fd[i], 6), fmt(rc.rate_fd_conv[i], 6),
               fmt(rc.rate_hd[i], 6)});
  }
  csv.close();
  write_meta(path, name, opts);
  return {path};
}

std::vector<std::string> run_table1(const RunOptions& opts) {
  const std::string path = out_path(opts, "table1");
  CsvWriter csv(path, {"scenario", "tx_power_dbm", "avg_gain_proposed_pct",
                       "avg_gain_conventional_pct"});
  const auto grid = default_snr_grid();
  for (int s = 1; s <= 3; ++s) {
    for (const double p : {5.0, 20.0}) {
      const ScenarioConfig sc = make_scenario(s, p);
      const RateCurves rc = achievable_rates(
          sc, grid, opts.trials,
          derive_seed(opts.seed, 90, s, static_cast<std::uint64_t>(p)), opts.workers);
      csv.row({sc.name, fmt(p, 1), fmt(rc.avg_gain_pct, 2), fmt(rc.avg_gain_conv_pct, 2)});
    }
  }
  csv.close();
  write_meta(path, "table1", opts);
  return {path};
}

// ---- custom residual sweep -------------------------------------------------

std::vector<std::string> run_residual_sweep(const RunOptions& opts) {
  const std::string scenario = opts.config.get_string("scenario", "");
  if (scenario.empty()) throw ConfigError("scenario: required for residual_sweep");
  const auto powers = opts.config.get_double_list("tx_power_dbm_list");
  if (powers.empty()) throw ConfigError("tx_power_dbm_list: empty sweep");

  const std::string path = out_path(opts, "residual_sweep");
  CsvWriter csv(path, {"tx_power_dbm", "total_residual_dbm", "conventional_dbm", "hd_floor_dbm"});
  int point = 0;
  for (const double p : powers) {
    const ScenarioConfig sc = scenario_by_name(scenario, p);
    const RunResult rr = measure_residual_si(sc, opts.trials,
                                             derive_seed(opts.seed, 95, point), opts.workers,
                                             false);
    csv.row({fmt(p), fmt(rr.residual_si_dbm), fmt(rr.conventional_dbm), fmt(rr.noise_floor_dbm)});
    ++point;
  }
  csv.close();
  write_meta(path, "residual_sweep", opts);
  return {path};
}

// ---- channel dump ----------------------------------------------------------

std::vector<std::string> run_dump_channel(const RunOptions& opts) {
  const std::string profile = opts.config.get_string("profile", "D");
  ChannelProfile p = ChannelProfile::kTgnD;
  if (profile == "B") p = ChannelProfile::kTgnB;
  else if (profile == "C") p = ChannelProfile::kTgnC;
  else if (profile != "D") throw ConfigError("profile: must be B, C or D");

  const int n_symbols = static_cast<int>(opts.config.get_int("n_symbols", 50));
  const double k_db = opts.config.get_double("rician_factor_db", 0.0);
  const double gain_db = opts.config.get_double("total_gain_db", -45.0);

  const auto ch = gen_channel(ChannelModelConfig::tgn(p, k_db, gain_db), n_symbols, opts.seed);
  const std::string path = out_path(opts, "channel_dump");
  CsvWriter csv(path, {"symbol_index", "tap_index", "re", "im"});
  for (int t = 0; t < ch.n_symbols(); ++t)
    for (int d = 0; d < ch.n_taps(); ++d)
      csv.row({fmt_int(t), fmt_int(d), fmt(ch.taps(t, d).real(), 12), fmt(ch.taps(t, d).imag(), 12)});
  csv.close();
  write_meta(path, "dump_channel", opts);
  return {path};
}

}  // namespace

std::vector<std::string> known_experiments() {
  return {"fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7a", "fig7b", "fig7c",
          "fig8a", "fig8b", "fig8c", "table1", "residual_sweep", "dump_channel"};
}

std::vector<std::string> run_experiment(const std::string& name, const RunOptions& opts) {
  if (opts.trials < 1) throw ConfigError("trials: must be >= 1");
  if (name == "fig3") return run_fig3(opts);
  if (name == "fig4") return run_fig4(opts);
  if (name == "fig5a") return run_fig5a(opts);
  if (name == "fig5b") return run_fig5b(opts);
  if (name == "fig6") return run_fig6(opts);
  if (name == "fig7a") return run_fig7(opts, 1);
  if (name == "fig7b") return run_fig7(opts, 2);
  if (name == "fig7c") return run_fig7(opts, 3);
  if (name == "fig8a") return run_fig8(opts, 1);
  if (name == "fig8b") return run_fig8(opts, 2);
  if (name == "fig8c") return run_fig8(opts, 3);
  if (name == "table1") return run_table1(opts);
  if (name == "residual_sweep") return run_residual_sweep(opts);
  if (name == "dump_channel") return run_dump_channel(opts);
  throw ConfigError("unknown experiment: " + name);
}

}  // namespace fdsic
