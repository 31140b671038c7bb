#pragma once

#include <optional>
#include <vector>

#include "fdsic/transceiver.hpp"

namespace fdsic {

// Per-subcarrier LS estimate of H_ord / H_aux, averaged over M training
// symbols. Subcarriers whose auxiliary sample magnitude falls below
// rel_threshold of the symbol RMS are excluded from the average.
struct ChannelRatioEstimate {
  CVec h_hat;
  int n_averaged = 0;
  int timestamp_symbol = 0;
  std::vector<int> excluded_count;  // per subcarrier

  int total_excluded() const;
};

ChannelRatioEstimate estimate_channel_ratio(const OfdmGrid& training_aux,
                                            const OfdmGrid& training_ord,
                                            double rel_threshold = 1e-6);

// Y_dc = Y_ord - h_hat .* Y_aux, column-wise.
OfdmGrid cancel(const OfdmGrid& y_ord, const OfdmGrid& y_aux,
                const ChannelRatioEstimate& est);

// Receiver-nonlinearity estimate from the extra training symbol. The basis
// term R_k = (1/M) sum_m D(X_m)_k / X_m,k tracks the distortion leakage that
// the LS channel estimate absorbed during training, so subtraction stays
// exact for any averaging depth.
struct NonlinEstimate {
  Complex alpha3_hat{0.0, 0.0};
  CVec h_ord_hat;        // per subcarrier, used to rebuild the LNA input
  CVec pollution_basis;  // R_k above
  int n_excluded = 0;
};

// Frequency-domain distortion of one symbol rebuilt from known data and the
// channel estimate: DFT[ (x conv h)|x conv h|^2 ] with unit alpha3.
CVec distortion_basis(const CVec& x_freq, const CVec& h_ord);

NonlinEstimate estimate_alpha3(const CMat& x_training,   // N x M known symbols behind h_hat
                               const CVec& x_tr2,        // known nonlinearity training symbol
                               const CVec& y_dc_tr2,     // cancelled tr2 column
                               const CVec& h_ord_hat,
                               double rel_threshold = 1e-6);

// Subtract alpha3_hat * (D(X_s) - X_s .* R) from each data column.
OfdmGrid reconstruct_and_subtract(const OfdmGrid& y_dc, const OfdmGrid& x_data,
                                  const NonlinEstimate& est);

}  // namespace fdsic
