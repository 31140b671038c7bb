#include "fdsic/cancellation.hpp"

#include <numeric>
#include <stdexcept>

namespace fdsic {

int ChannelRatioEstimate::total_excluded() const {
  return std::accumulate(excluded_count.begin(), excluded_count.end(), 0);
}

ChannelRatioEstimate estimate_channel_ratio(const OfdmGrid& training_aux,
                                            const OfdmGrid& training_ord,
                                            double rel_threshold) {
  const int n = training_aux.n_subcarriers;
  const int m = training_aux.n_symbols();
  if (m < 1) throw std::invalid_argument("estimate_channel_ratio: need at least one training symbol");
  if (training_ord.n_symbols() != m || training_ord.n_subcarriers != n)
    throw std::invalid_argument("estimate_channel_ratio: grid dimensions disagree");

  ChannelRatioEstimate est;
  est.n_averaged = m;
  est.timestamp_symbol = m - 1;
  est.h_hat = CVec::Zero(n);
  est.excluded_count.assign(n, 0);

  Eigen::VectorXi used = Eigen::VectorXi::Zero(n);
  for (int l = 0; l < m; ++l) {
    const double rms = std::sqrt(mean_power(CVec(training_aux.symbols.col(l))));
    const double floor = rel_threshold * rms;
    for (int k = 0; k < n; ++k) {
      const Complex denom = training_aux.symbols(k, l);
      if (std::abs(denom) <= floor) {
        ++est.excluded_count[k];
        continue;
      }
      est.h_hat[k] += training_ord.symbols(k, l) / denom;
      ++used[k];
    }
  }
  for (int k = 0; k < n; ++k)
    est.h_hat[k] = used[k] > 0 ? est.h_hat[k] / static_cast<double>(used[k]) : Complex{0.0, 0.0};
  return est;
}

OfdmGrid cancel(const OfdmGrid& y_ord, const OfdmGrid& y_aux, const ChannelRatioEstimate& est) {
  if (y_ord.n_subcarriers != y_aux.n_subcarriers || y_ord.n_symbols() != y_aux.n_symbols())
    throw std::invalid_argument("cancel: grid dimensions disagree");
  if (est.h_hat.size() != y_ord.n_subcarriers)
    throw std::invalid_argument("cancel: estimate dimension mismatch");

  OfdmGrid out = y_ord;
  for (int l = 0; l < out.n_symbols(); ++l)
    out.symbols.col(l) -= est.h_hat.cwiseProduct(y_aux.symbols.col(l));
  return out;
}

CVec distortion_basis(const CVec& x_freq, const CVec& h_ord) {
  const CVec u = idft_unitary(x_freq.cwiseProduct(h_ord));
  CVec cubed(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) cubed[i] = u[i] * std::norm(u[i]);
  return dft_unitary(cubed);
}

NonlinEstimate estimate_alpha3(const CMat& x_training, const CVec& x_tr2,
                               const CVec& y_dc_tr2, const CVec& h_ord_hat,
                               double rel_threshold) {
  const int n = static_cast<int>(x_tr2.size());
  const int m = static_cast<int>(x_training.cols());
  if (y_dc_tr2.size() != n || h_ord_hat.size() != n || (m > 0 && x_training.rows() != n))
    throw std::invalid_argument("estimate_alpha3: dimension mismatch");

  NonlinEstimate est;
  est.h_ord_hat = h_ord_hat;
  est.pollution_basis = CVec::Zero(n);
  for (int l = 0; l < m; ++l) {
    const CVec d = distortion_basis(x_training.col(l), h_ord_hat);
    for (int k = 0; k < n; ++k) {
      const Complex x = x_training(k, l);
      if (x == Complex{0.0, 0.0})
        throw std::invalid_argument("estimate_alpha3: zero training subcarrier");
      est.pollution_basis[k] += d[k] / x;
    }
  }
  if (m > 0) est.pollution_basis /= static_cast<double>(m);

  const CVec d2 = distortion_basis(x_tr2, h_ord_hat);
  CVec basis(n);
  for (int k = 0; k < n; ++k) basis[k] = d2[k] - x_tr2[k] * est.pollution_basis[k];

  const double rms = std::sqrt(mean_power(basis));
  const double floor = rel_threshold * rms;
  Complex acc{0.0, 0.0};
  int used = 0;
  for (int k = 0; k < n; ++k) {
    if (std::abs(basis[k]) <= floor) {
      ++est.n_excluded;
      continue;
    }
    acc += y_dc_tr2[k] / basis[k];
    ++used;
  }
  if (used == 0)
    throw std::invalid_argument(
        "estimate_alpha3: degenerate training pair, every subcarrier excluded");
  est.alpha3_hat = acc / static_cast<double>(used);
  return est;
}

OfdmGrid reconstruct_and_subtract(const OfdmGrid& y_dc, const OfdmGrid& x_data,
                                  const NonlinEstimate& est) {
  if (y_dc.n_symbols() != x_data.n_symbols() || y_dc.n_subcarriers != x_data.n_subcarriers)
    throw std::invalid_argument("reconstruct_and_subtract: grid dimensions disagree");
  if (est.alpha3_hat == Complex{0.0, 0.0}) return y_dc;

  OfdmGrid out = y_dc;
  for (int l = 0; l < out.n_symbols(); ++l) {
    const CVec d = distortion_basis(x_data.symbols.col(l), est.h_ord_hat);
    out.symbols.col(l) -=
        est.alpha3_hat * (d - x_data.symbols.col(l).cwiseProduct(est.pollution_basis));
  }
  return out;
}

}  // namespace fdsic
