#include <doctest.h>

#include <map>
#include <vector>

#include "fdsic/experiments.hpp"
#include "oracles.hpp"

using namespace fdsic;

namespace {

TransceiverConfig impairment_free(double tx_dbm = 20.0) {
  TransceiverConfig trx = default_transceiver(tx_dbm);
  trx.tx_phase_noise_on = false;
  trx.tx_nonlinearity_on = false;
  trx.rx_phase_noise_on = false;
  trx.rx_nonlinearity_on = false;
  trx.gaussian_noise_on = false;
  trx.quantization_on = false;
  return trx;
}

struct ChainRun {
  OfdmGrid grid;
  TransmitOutput tx;
  ChannelRealization ch;
  ReceptionResult rec;
};

ChainRun run_chain(const TransceiverConfig& trx, const FrameStructure& frame,
                   const ChannelModelConfig& chcfg, std::uint64_t seed) {
  ChainRun r;
  Rng rng(derive_seed(seed, 1));
  r.grid = make_frame_grid(frame, rng);
  r.tx = transmit(r.grid, trx, derive_seed(seed, 2));
  r.ch = gen_channel(chcfg, frame.total_symbols(), derive_seed(seed, 3));
  r.rec = receive(r.tx, r.ch, trx.aux_channel, nullptr, frame, trx, derive_seed(seed, 4));
  return r;
}

ChannelModelConfig static_tgn_d(double k_db, double gain_db) {
  return ChannelModelConfig::tgn(ChannelProfile::kTgnD, k_db, gain_db, 0.0);
}

}  // namespace

TEST_CASE("noise-free flat channels give the exact channel ratio") {
  const FrameStructure frame{2, 0, 3};
  TransceiverConfig trx = impairment_free();
  trx.aux_channel.gain = Complex{0.4, -0.2};
  ChainRun r = run_chain(trx, frame, static_tgn_d(200.0, -20.0), 5);
  OfdmGrid tr_aux = r.rec.y_aux, tr_ord = r.rec.y_ord;
  tr_aux.symbols = r.rec.y_aux.symbols.leftCols(2);
  tr_ord.symbols = r.rec.y_ord.symbols.leftCols(2);
  const auto est = estimate_channel_ratio(tr_aux, tr_ord);
  const CVec truth =
      r.ch.freq_response(0, 64).cwiseQuotient(trx.aux_channel.freq_response(64));
  CHECK((est.h_hat - truth).norm() / truth.norm() < 1e-10);
  CHECK(est.n_averaged == 2);
  CHECK(est.total_excluded() == 0);
}

TEST_CASE("near-zero auxiliary subcarriers are flagged and excluded") {
  OfdmGrid aux, ord;
  aux.symbols = CMat::Ones(64, 2);
  ord.symbols = CMat::Constant(64, 2, Complex{2.0, 0.0});
  aux.symbols(7, 0) = 0.0;   // excluded in symbol 0 only
  aux.symbols(9, 0) = 0.0;   // excluded everywhere
  aux.symbols(9, 1) = 0.0;
  const auto est = estimate_channel_ratio(aux, ord);
  CHECK(est.excluded_count[7] == 1);
  CHECK(est.excluded_count[9] == 2);
  CHECK(est.h_hat[7] == Complex{2.0, 0.0});  // surviving symbol still contributes
  CHECK(est.h_hat[9] == Complex{0.0, 0.0});  // nothing usable: flagged, no estimate
  CHECK(est.h_hat[3] == Complex{2.0, 0.0});
}

TEST_CASE("estimation error variance scales as 1/M") {
  const ChannelModelConfig chcfg = static_tgn_d(20.0, -45.0);
  TransceiverConfig trx = default_transceiver(20.0);
  trx.rx_nonlinearity_on = false;
  std::map<int, double> err;
  for (const int m : {2, 4, 8}) {
    const FrameStructure frame{m, 0, 1};
    double acc = 0.0;
    const int n_trials = 500;
    for (int t = 0; t < n_trials; ++t) {
      ChainRun r = run_chain(trx, frame, chcfg, 100000 + t);
      OfdmGrid tr_aux = r.rec.y_aux, tr_ord = r.rec.y_ord;
      tr_aux.symbols = r.rec.y_aux.symbols.leftCols(m);
      tr_ord.symbols = r.rec.y_ord.symbols.leftCols(m);
      const auto est = estimate_channel_ratio(tr_aux, tr_ord);
      const CVec truth =
          r.ch.freq_response(0, 64).cwiseQuotient(trx.aux_channel.freq_response(64));
      acc += (est.h_hat - truth).squaredNorm() / 64.0;
    }
    err[m] = acc / n_trials;
  }
  CHECK(err[2] / err[4] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(err[4] / err[8] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("impairment-free chains with the exact ratio cancel to numerical precision") {
  const FrameStructure frame{1, 0, 6};
  TransceiverConfig trx = impairment_free();
  ChainRun r = run_chain(trx, frame, static_tgn_d(10.0, -30.0), 7);
  ChannelRatioEstimate est;
  est.h_hat = r.ch.freq_response(0, 64).cwiseQuotient(trx.aux_channel.freq_response(64));
  est.n_averaged = 1;
  est.excluded_count.assign(64, 0);
  const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
  const double si = mean_power(r.rec.y_ord.symbols);
  CHECK(lin_to_db(mean_power(y_dc.symbols) / si) < -250.0);
}

TEST_CASE("cancel rejects mismatched dimensions") {
  OfdmGrid a, b;
  a.symbols = CMat::Ones(64, 2);
  b.symbols = CMat::Ones(64, 3);
  ChannelRatioEstimate est;
  est.h_hat = CVec::Ones(64);
  CHECK_THROWS_AS(cancel(a, b, est), std::invalid_argument);
}

TEST_CASE("Gaussian and quantization residual is the sum of the uncorrelated noise powers") {
  const FrameStructure frame{1, 0, 20};
  TransceiverConfig trx = impairment_free();
  trx.gaussian_noise_on = true;
  trx.quantization_on = true;
  double resid_acc = 0.0, parts_acc = 0.0;
  for (int t = 0; t < 50; ++t) {
    ChainRun r = run_chain(trx, frame, static_tgn_d(0.0, -45.0), 8000 + t);
    ChannelRatioEstimate est;
    est.h_hat = r.ch.freq_response(0, 64).cwiseQuotient(trx.aux_channel.freq_response(64));
    est.n_averaged = 1;
    est.excluded_count.assign(64, 0);
    const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
    resid_acc += mean_power(y_dc.symbols);

    // ordinary-chain terms from the ground truth; auxiliary noise referred
    // through the cancellation multiplier
    const ComplexSignal aux_clean = apply_aux_channel(r.tx.y_tx, trx.aux_channel);
    const OfdmGrid aux_clean_grid = ofdm_demodulate(aux_clean, frame);
    CMat aux_noise = r.rec.y_aux.symbols - aux_clean_grid.symbols;
    for (int l = 0; l < aux_noise.cols(); ++l)
      aux_noise.col(l) = est.h_hat.cwiseProduct(CVec(aux_noise.col(l)));
    parts_acc += mean_power(r.rec.ground_truth.gaussian.symbols) +
                 mean_power(r.rec.ground_truth.quantization.symbols) + mean_power(aux_noise);
  }
  CHECK(std::abs(lin_to_db(resid_acc / parts_acc)) < 0.3);
}

TEST_CASE("shared-PLL phase noise cancels exactly over a frequency-flat channel") {
  const FrameStructure frame{1, 0, 6};
  TransceiverConfig trx = impairment_free();
  trx.rx_phase_noise_on = true;
  ChainRun r = run_chain(trx, frame, static_tgn_d(300.0, -25.0), 9);  // K -> inf: flat
  ChannelRatioEstimate est;
  est.h_hat = r.ch.freq_response(0, 64).cwiseQuotient(trx.aux_channel.freq_response(64));
  est.n_averaged = 1;
  est.excluded_count.assign(64, 0);
  const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
  const double si = mean_power(r.rec.y_ord.symbols);
  CHECK(lin_to_db(mean_power(y_dc.symbols) / si) < -100.0);
}

TEST_CASE("phase-noise-only residual never exceeds the closed-form upper bound") {
  const double tx_dbm = 20.0;
  for (const double nlos_dbm : {-35.0, -25.0}) {
    TrialSpec spec;
    spec.trx = default_transceiver(tx_dbm);
    spec.trx.gaussian_noise_on = false;
    spec.trx.quantization_on = false;
    spec.trx.rx_nonlinearity_on = false;
    spec.channel = ChannelModelConfig::tgn(ChannelProfile::kTgnD, kNegInfDb,
                                           nlos_dbm - tx_dbm, 0.0);
    spec.frame = FrameStructure{1, 0, 10};
    spec.perfect_channel_knowledge = true;
    const auto trials = run_trials(spec, 100, 4242, 0);
    const double resid_dbm = lin_to_db(mean_residual(trials)) + tx_dbm;
    const double bound = residual_si_upper_bound(tx_dbm, nlos_dbm - tx_dbm, -40.0);
    CHECK(resid_dbm < bound + 1.0);
  }
}

TEST_CASE("phase-noise residual is blind to the LOS component") {
  // scaling the static LOS part at fixed diffuse power leaves the residual
  // unchanged
  const double tx_dbm = 20.0;
  const double diffuse_db = -45.0;
  std::vector<double> resid;
  for (const double k_db : {kNegInfDb, 0.0, 20.0}) {
    const double total_db =
        std::isinf(k_db) ? diffuse_db : diffuse_db + lin_to_db(1.0 + db_to_lin(k_db));
    TrialSpec spec;
    spec.trx = default_transceiver(tx_dbm);
    spec.trx.gaussian_noise_on = false;
    spec.trx.quantization_on = false;
    spec.trx.rx_nonlinearity_on = false;
    spec.channel = ChannelModelConfig::tgn(ChannelProfile::kTgnD, k_db, total_db, 0.0);
    spec.frame = FrameStructure{1, 0, 10};
    spec.perfect_channel_knowledge = true;
    resid.push_back(lin_to_db(mean_residual(run_trials(spec, 300, 777, 0))));
  }
  CHECK(std::abs(resid[0] - resid[1]) < 1.0);
  CHECK(std::abs(resid[0] - resid[2]) < 1.0);
}

TEST_CASE("alpha3 estimator: zero injected nonlinearity estimates zero") {
  const FrameStructure frame{1, 1, 4};
  TransceiverConfig trx = impairment_free();
  ChainRun r = run_chain(trx, frame, static_tgn_d(10.0, -25.0), 21);
  OfdmGrid tr_aux = r.rec.y_aux, tr_ord = r.rec.y_ord;
  tr_aux.symbols = r.rec.y_aux.symbols.leftCols(1);
  tr_ord.symbols = r.rec.y_ord.symbols.leftCols(1);
  const auto est = estimate_channel_ratio(tr_aux, tr_ord);
  const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
  const CVec h_ord_hat = est.h_hat.cwiseProduct(trx.aux_channel.freq_response(64));
  const auto nl = estimate_alpha3(r.grid.symbols.leftCols(1), r.grid.symbols.col(1),
                                  y_dc.symbols.col(1), h_ord_hat);
  CHECK(std::abs(nl.alpha3_hat) < 1e-10);
}

TEST_CASE("alpha3 estimator recovers the injected coefficient exactly without noise") {
  const FrameStructure frame{1, 1, 4};
  TransceiverConfig trx = impairment_free();
  const Complex a3{0.9, 0.0};
  trx.rx_nonlinearity_on = true;
  trx.rx_lna = NonlinearityConfig::third_order({1.0, 0.0}, a3);
  trx.rx_lna_cal_ref_dbm = trx.tx_power_dbm;  // no rescale in this test
  ChainRun r = run_chain(trx, frame, static_tgn_d(10.0, -25.0), 23);

  OfdmGrid tr_aux = r.rec.y_aux, tr_ord = r.rec.y_ord;
  tr_aux.symbols = r.rec.y_aux.symbols.leftCols(1);
  tr_ord.symbols = r.rec.y_ord.symbols.leftCols(1);
  const auto est = estimate_channel_ratio(tr_aux, tr_ord);
  const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
  const CVec h_ord_hat = est.h_hat.cwiseProduct(trx.aux_channel.freq_response(64));
  const auto nl = estimate_alpha3(r.grid.symbols.leftCols(1), r.grid.symbols.col(1),
                                  y_dc.symbols.col(1), h_ord_hat);
  // the estimator sees the unit-power-normalized transmit signal
  const Complex expected = a3 * std::pow(r.tx.scale, 3.0);
  CHECK(std::abs(nl.alpha3_hat - expected) / std::abs(expected) < 1e-6);
}

TEST_CASE("reconstruct_and_subtract removes the distortion to numerical precision") {
  const FrameStructure frame{2, 1, 8};
  TransceiverConfig trx = impairment_free();
  trx.rx_nonlinearity_on = true;
  trx.rx_lna = NonlinearityConfig::third_order({1.0, 0.0}, {0.5, 0.2});
  trx.rx_lna_cal_ref_dbm = trx.tx_power_dbm;
  ChainRun r = run_chain(trx, frame, static_tgn_d(0.0, -30.0), 29);

  OfdmGrid tr_aux = r.rec.y_aux, tr_ord = r.rec.y_ord;
  tr_aux.symbols = r.rec.y_aux.symbols.leftCols(2);
  tr_ord.symbols = r.rec.y_ord.symbols.leftCols(2);
  const auto est = estimate_channel_ratio(tr_aux, tr_ord);
  const OfdmGrid y_dc = cancel(r.rec.y_ord, r.rec.y_aux, est);
  const CVec h_ord_hat = est.h_hat.cwiseProduct(trx.aux_channel.freq_response(64));
  const auto nl = estimate_alpha3(r.grid.symbols.leftCols(2), r.grid.symbols.col(2),
                                  y_dc.symbols.col(2), h_ord_hat);

  OfdmGrid y_dc_data = y_dc, x_data = r.grid;
  y_dc_data.symbols = y_dc.symbols.rightCols(8);
  x_data.symbols = r.grid.symbols.rightCols(8);
  const OfdmGrid cleaned = reconstruct_and_subtract(y_dc_data, x_data, nl);
  const double dist_power = mean_power(r.rec.ground_truth.rx_distortion.symbols);
  CHECK(lin_to_db(mean_power(cleaned.symbols) / dist_power) < -120.0);

  // alpha3 = 0 passes grids through untouched
  NonlinEstimate null;
  null.h_ord_hat = h_ord_hat;
  null.pollution_basis = CVec::Zero(64);
  const OfdmGrid same = reconstruct_and_subtract(y_dc_data, x_data, null);
  CHECK((same.symbols - y_dc_data.symbols).norm() == 0.0);
}

TEST_CASE("alpha3 estimator rejects degenerate training") {
  const CVec x1 = CVec::Ones(64);
  CMat tr(64, 1);
  tr.col(0) = x1;
  const CVec h = CVec::Ones(64);
  // tr2 proportional to tr1: the basis cancels on every subcarrier
  CHECK_THROWS_AS(estimate_alpha3(tr, 2.0 * x1, CVec::Zero(64), h), std::invalid_argument);
}
