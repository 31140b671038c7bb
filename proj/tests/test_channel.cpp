#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "fdsic/channel.hpp"
#include "oracles.hpp"

using namespace fdsic;

TEST_CASE("pure-LOS limit: one deterministic tap, flat response, no time variation") {
  auto cfg = ChannelModelConfig::tgn(ChannelProfile::kTgnB, 200.0, -25.0, 5.0);
  const auto ch = gen_channel(cfg, 50, 1);
  for (int d = 0; d < ch.n_taps(); ++d)
    CHECK((ch.taps.col(d).array() - ch.taps(0, d)).abs().maxCoeff() < 1e-8);
  const CVec h = ch.freq_response(0, 64);
  CHECK((h.array() - h[0]).abs().maxCoeff() / std::abs(h[0]) < 1e-6);
  CHECK(mean_power(h) == doctest::Approx(db_to_lin(-25.0)).epsilon(1e-6));
}

TEST_CASE("ensemble tap power matches the configured total gain") {
  auto cfg = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 20.0, -25.0, 0.0);
  double total = 0.0;
  const int n_seeds = 1000;
  for (int s = 0; s < n_seeds; ++s)
    total += gen_channel(cfg, 1, 1000 + s).taps.row(0).squaredNorm();
  total /= n_seeds;
  CHECK(std::abs(lin_to_db(total / db_to_lin(-25.0))) < 0.2);
}

TEST_CASE("LOS / diffuse split of the first tap matches the Rician factor") {
  auto cfg = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 10.0, -20.0, 0.0);
  const int n_seeds = 2000;
  double tap0_power = 0.0;
  for (int s = 0; s < n_seeds; ++s)
    tap0_power += std::norm(gen_channel(cfg, 1, 77000 + s).taps(0, 0));
  tap0_power /= n_seeds;

  const double expected_total = db_to_lin(-20.0);
  const double p_diffuse = expected_total / (1.0 + db_to_lin(10.0));
  const double p_los = expected_total - p_diffuse;
  double pdp0 = 0.0, pdp_sum = 0.0;
  for (int d = 0; d < 9; ++d) {  // TGn-D: 9 taps, 50 ns rms decay
    const double w = std::exp(-d * 50.0 / 50.0);
    pdp_sum += w;
    if (d == 0) pdp0 = w;
  }
  const double expected_tap0 = p_los + p_diffuse * pdp0 / pdp_sum;
  CHECK(std::abs(lin_to_db(tap0_power / expected_tap0)) < 0.5);
}

TEST_CASE("identical seed and config reproduce the realization bit for bit") {
  auto cfg = ChannelModelConfig::tgn(ChannelProfile::kTgnC, 0.0, -45.0, 5.0);
  const auto a = gen_channel(cfg, 20, 42);
  const auto b = gen_channel(cfg, 20, 42);
  CHECK((a.taps - b.taps).norm() == 0.0);
  const auto c = gen_channel(cfg, 20, 43);
  CHECK((a.taps - c.taps).norm() != 0.0);
}

TEST_CASE("diffuse tap autocorrelation follows the Jakes closed form") {
  // measurable Doppler: 500 Hz over 150 four-microsecond symbols spans
  // 2 pi fD tau up to 1.9 rad
  ChannelModelConfig cfg;
  cfg.profile = ChannelProfile::kCustom;
  cfg.max_delay_ns = 0.0;  // single tap
  cfg.rms_delay_ns = 50.0;
  cfg.rician_factor_db = kNegInfDb;
  cfg.total_gain_db = 0.0;
  cfg.doppler_hz = 500.0;
  const int n_sym = 150;
  const int n_real = 500;
  std::vector<double> corr(n_sym, 0.0);
  double power = 0.0;
  for (int r = 0; r < n_real; ++r) {
    const auto ch = gen_channel(cfg, n_sym, 9000 + r);
    for (int tau = 0; tau < n_sym; ++tau)
      corr[tau] += (ch.taps(tau, 0) * std::conj(ch.taps(0, 0))).real();
    power += std::norm(ch.taps(0, 0));
  }
  for (const int tau : {10, 40, 80, 140}) {
    const double measured = corr[tau] / power;
    const double expected = oracle::jakes_autocorr(500.0, tau * 4e-6);
    CHECK(std::abs(measured - expected) < 0.06);  // ~95% band at 500 realizations
  }
}

TEST_CASE("apply_channel: unit tap at delay zero is the identity") {
  Rng rng(3);
  FrameStructure frame{0, 0, 3};
  const ComplexSignal sig = ofdm_modulate(make_frame_grid(frame, rng));
  const auto ch = ChannelRealization::identity(3);
  CHECK((apply_channel(sig, ch, 80).samples - sig.samples).norm() == 0.0);
}

TEST_CASE("apply_channel: single tap at delay d gives the shift-theorem phase ramp") {
  Rng rng(5);
  FrameStructure frame{0, 0, 1};
  const OfdmGrid grid = make_frame_grid(frame, rng);
  const ComplexSignal sig = ofdm_modulate(grid);
  const int d = 4;
  ChannelRealization ch;
  ch.taps = CMat::Zero(1, d + 1);
  ch.taps(0, d) = 1.0;
  const OfdmGrid rx = ofdm_demodulate(apply_channel(sig, ch, 80), frame);
  for (int k = 0; k < 64; ++k) {
    const Complex expect = grid.symbols(k, 0) * std::polar(1.0, -2.0 * kPi * k * d / 64.0);
    CHECK(std::abs(rx.symbols(k, 0) - expect) < 1e-10);
  }
}

TEST_CASE("apply_channel: random two-tap channel equals the frequency-domain product") {
  Rng rng(6);
  FrameStructure frame{0, 0, 4};
  const OfdmGrid grid = make_frame_grid(frame, rng);
  const ComplexSignal sig = ofdm_modulate(grid);
  ChannelRealization ch;
  ch.taps.resize(4, 2);
  for (int t = 0; t < 4; ++t) {
    ch.taps(t, 0) = Complex(rng.gaussian(), rng.gaussian());
    ch.taps(t, 1) = Complex(rng.gaussian(), rng.gaussian());
  }
  const OfdmGrid rx = ofdm_demodulate(apply_channel(sig, ch, 80), frame);
  for (int t = 1; t < 4; ++t) {  // first symbol sees the zero-padded signal start
    const CVec expect = grid.symbols.col(t).cwiseProduct(ch.freq_response(t, 64));
    CHECK((rx.symbols.col(t) - expect).norm() / expect.norm() < 1e-9);
  }
}

TEST_CASE("apply_channel rejects a channel shorter than the signal") {
  ComplexSignal sig;
  sig.samples = CVec::Zero(160);
  const auto ch = ChannelRealization::identity(1);
  CHECK_THROWS_AS(apply_channel(sig, ch, 80), std::invalid_argument);
}

TEST_CASE("freq_response equals the zero-padded tap DFT oracle") {
  auto cfg = ChannelModelConfig::tgn(ChannelProfile::kTgnD, 0.0, -45.0, 5.0);
  const auto ch = gen_channel(cfg, 3, 11);
  const CVec h = ch.freq_response(2, 64);
  CVec padded = CVec::Zero(64);
  for (int d = 0; d < ch.n_taps(); ++d) padded[d] = ch.taps(2, d);
  const CVec expect = oracle::dft(padded) * std::sqrt(64.0);
  CHECK((h - expect).norm() / expect.norm() < 1e-10);
}

TEST_CASE("coherence bandwidth: flat channel spans the full band") {
  const auto ch = ChannelRealization::identity(1);
  CHECK(coherence_bandwidth_hz(ch) == doctest::Approx(20e6));
}

TEST_CASE("coherence bandwidth: two equal taps cross 0.9 at the closed-form offset") {
  ChannelRealization ch;
  ch.taps.resize(1, 2);
  ch.taps(0, 0) = std::sqrt(0.5);
  ch.taps(0, 1) = std::sqrt(0.5);
  // |R(df)| = |cos(pi df tau)| with tau = 50 ns; 0.9 crossing at 2.87 MHz
  const double expected = std::acos(0.9) / (kPi * 50e-9);
  CHECK(coherence_bandwidth_hz(ch) == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("coherence bandwidth orders the TGn profiles B > C > D") {
  std::map<ChannelProfile, double> median_cbw;
  for (const auto profile : {ChannelProfile::kTgnB, ChannelProfile::kTgnC, ChannelProfile::kTgnD}) {
    auto cfg = ChannelModelConfig::tgn(profile, kNegInfDb, -30.0, 0.0);
    std::vector<double> cbw;
    for (int s = 0; s < 500; ++s)
      cbw.push_back(coherence_bandwidth_hz(gen_channel(cfg, 1, 500 + s)));
    std::nth_element(cbw.begin(), cbw.begin() + cbw.size() / 2, cbw.end());
    median_cbw[profile] = cbw[cbw.size() / 2];
  }
  CHECK(median_cbw[ChannelProfile::kTgnB] > median_cbw[ChannelProfile::kTgnC]);
  CHECK(median_cbw[ChannelProfile::kTgnC] > median_cbw[ChannelProfile::kTgnD]);
}

TEST_CASE("aux channel: flat by default, near-flat with a ripple tap") {
  AuxChannel aux;
  aux.gain = Complex{0.5, 0.25};
  const CVec h = aux.freq_response(64);
  CHECK((h.array() - aux.gain).abs().maxCoeff() == 0.0);

  Rng rng(2);
  FrameStructure frame{0, 0, 2};
  const ComplexSignal sig = ofdm_modulate(make_frame_grid(frame, rng));
  const ComplexSignal out = apply_aux_channel(sig, aux);
  CHECK((out.samples - aux.gain * sig.samples).norm() == 0.0);

  aux.ripple_tap = Complex{0.05, 0.0};
  const CVec hr = aux.freq_response(64);
  CHECK(hr[0] == aux.gain * Complex{1.05, 0.0});
}
