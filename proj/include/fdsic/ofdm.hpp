#pragma once

#include <vector>

#include "fdsic/rng.hpp"
#include "fdsic/types.hpp"

namespace fdsic {

// Time-domain complex baseband samples plus their sample rate. Unit mean
// power corresponds to a configured absolute dBm level; all dBm figures
// derive from that one reference.
struct ComplexSignal {
  CVec samples;
  double sample_rate_hz = 20e6;
  int size() const { return static_cast<int>(samples.size()); }
};

enum class SymbolKind { kTraining, kNonlinTraining, kData };

// Frequency-domain subcarrier symbols, one column per OFDM symbol.
struct OfdmGrid {
  CMat symbols;  // n_subcarriers x n_symbols
  int n_subcarriers = 64;
  int cp_len = 16;
  std::vector<SymbolKind> kind;
  int n_symbols() const { return static_cast<int>(symbols.cols()); }
};

// Preamble-based frame: channel-estimation training symbols first, one
// optional nonlinearity training symbol, then data.
struct FrameStructure {
  int n_training = 1;
  int n_nonlin_training = 0;
  int n_data = 25;
  int total_symbols() const { return n_training + n_nonlin_training + n_data; }
  double training_overhead() const { return static_cast<double>(n_training) / n_data; }
};

double mean_power(const CVec& x);
inline double mean_power(const ComplexSignal& s) { return mean_power(s.samples); }
double mean_power(const CMat& x);

// 10*log10(mean |s|^2) shifted so that unit power reads ref_dbm_at_unit_power.
double measure_power_dbm(const ComplexSignal& s, double ref_dbm_at_unit_power);

// Unitary transforms (1/sqrt(N) both directions) so power reads identically
// in both domains.
CVec dft_unitary(const CVec& x);
CVec idft_unitary(const CVec& x);

// IDFT per symbol with cyclic prefix prepended. Body-sample power equals grid
// power; the CP duplicates body samples and is discarded on demodulation.
ComplexSignal ofdm_modulate(const OfdmGrid& grid, double sample_rate_hz = 20e6);

OfdmGrid ofdm_demodulate(const ComplexSignal& sig, const FrameStructure& frame,
                         int n_subcarriers = 64, int cp_len = 16);

// Unit-magnitude QPSK on all subcarriers, training and data alike (keeps the
// per-subcarrier LS division well conditioned).
OfdmGrid make_frame_grid(const FrameStructure& frame, Rng& rng, int n_subcarriers = 64,
                         int cp_len = 16);

std::vector<SymbolKind> frame_symbol_kinds(const FrameStructure& frame);

}  // namespace fdsic
