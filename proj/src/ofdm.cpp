#include "fdsic/ofdm.hpp"

#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace fdsic {

double mean_power(const CVec& x) {
  if (x.size() == 0) return 0.0;
  return x.squaredNorm() / static_cast<double>(x.size());
}

double mean_power(const CMat& x) {
  if (x.size() == 0) return 0.0;
  return x.squaredNorm() / static_cast<double>(x.size());
}

double measure_power_dbm(const ComplexSignal& s, double ref_dbm_at_unit_power) {
  if (s.size() == 0) throw std::invalid_argument("measure_power_dbm: empty signal");
  return lin_to_db(mean_power(s)) + ref_dbm_at_unit_power;
}

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

CVec dft_unitary(const CVec& x) {
  const auto n = x.size();
  CVec out(n);
  fft_engine().fwd(out, x);
  out /= std::sqrt(static_cast<double>(n));
  return out;
}

CVec idft_unitary(const CVec& x) {
  const auto n = x.size();
  CVec out(n);
  fft_engine().inv(out, x);
  out *= std::sqrt(static_cast<double>(n));
  return out;
}

ComplexSignal ofdm_modulate(const OfdmGrid& grid, double sample_rate_hz) {
  const int n = grid.n_subcarriers;
  const int cp = grid.cp_len;
  if (n <= 0) throw std::invalid_argument("ofdm_modulate: n_subcarriers must be positive");
  if (cp < 0 || cp >= n) throw std::invalid_argument("ofdm_modulate: cp_len must be in [0, n_subcarriers)");
  if (grid.symbols.rows() != n) throw std::invalid_argument("ofdm_modulate: grid row count mismatch");

  const int n_sym = grid.n_symbols();
  ComplexSignal sig;
  sig.sample_rate_hz = sample_rate_hz;
  sig.samples.resize(static_cast<Eigen::Index>(n_sym) * (n + cp));
  for (int l = 0; l < n_sym; ++l) {
    const CVec body = idft_unitary(grid.symbols.col(l));
    auto dst = sig.samples.segment(static_cast<Eigen::Index>(l) * (n + cp), n + cp);
    dst.head(cp) = body.tail(cp);
    dst.tail(n) = body;
  }
  return sig;
}

OfdmGrid ofdm_demodulate(const ComplexSignal& sig, const FrameStructure& frame,
                         int n_subcarriers, int cp_len) {
  const int n = n_subcarriers;
  const int cp = cp_len;
  const int n_sym = frame.total_symbols();
  if (sig.size() != n_sym * (n + cp))
    throw std::invalid_argument("ofdm_demodulate: signal length does not match frame layout");

  OfdmGrid grid;
  grid.n_subcarriers = n;
  grid.cp_len = cp;
  grid.symbols.resize(n, n_sym);
  grid.kind = frame_symbol_kinds(frame);
  for (int l = 0; l < n_sym; ++l) {
    const CVec body = sig.samples.segment(static_cast<Eigen::Index>(l) * (n + cp) + cp, n);
    grid.symbols.col(l) = dft_unitary(body);
  }
  return grid;
}

std::vector<SymbolKind> frame_symbol_kinds(const FrameStructure& frame) {
  std::vector<SymbolKind> kinds;
  kinds.reserve(frame.total_symbols());
  for (int i = 0; i < frame.n_training; ++i) kinds.push_back(SymbolKind::kTraining);
  for (int i = 0; i < frame.n_nonlin_training; ++i) kinds.push_back(SymbolKind::kNonlinTraining);
  for (int i = 0; i < frame.n_data; ++i) kinds.push_back(SymbolKind::kData);
  return kinds;
}

OfdmGrid make_frame_grid(const FrameStructure& frame, Rng& rng, int n_subcarriers, int cp_len) {
  OfdmGrid grid;
  grid.n_subcarriers = n_subcarriers;
  grid.cp_len = cp_len;
  grid.kind = frame_symbol_kinds(frame);
  grid.symbols.resize(n_subcarriers, frame.total_symbols());
  for (int l = 0; l < grid.n_symbols(); ++l)
    for (int k = 0; k < n_subcarriers; ++k) grid.symbols(k, l) = rng.qpsk();
  return grid;
}

}  // namespace fdsic
