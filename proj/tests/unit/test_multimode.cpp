#include <doctest.h>

#include "afc/error.hpp"
#include "afc/experiments.hpp"
#include "afc/multimode.hpp"
#include "afc/units.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace afc;

TEST_CASE("mode capacity") {
  for (int m : {1, 3, 10, 50}) {
    ModeCapacity c = mode_capacity(6.0 * m * kTwoPi, kTwoPi, 0.0);
    CHECK(c.n_modes == m);
    CHECK(c.n_peaks == doctest::Approx(6.0 * m));
    CHECK(c.approx == doctest::Approx(m));
  }
  // Eu: Gamma = 12 MHz, Delta = 20 kHz
  ModeCapacity eu = mode_capacity(hz_to_rad(12e6), hz_to_rad(20e3), 0.0);
  CHECK(eu.n_modes == 100);
  CHECK(eu.n_peaks == doctest::Approx(600.0));
  CHECK(mode_capacity(hz_to_rad(12e6), hz_to_rad(20e3), 5e-6).n_modes == 90);
  CHECK(mode_capacity(hz_to_rad(12e6), hz_to_rad(20e3), 1.0).n_modes == 0);
}

TEST_CASE("mode train layout") {
  ModeTrain t = make_mode_train(100, hz_to_rad(12e6), hz_to_rad(20e3), 0.0);
  CHECK(t.slot == doctest::Approx(0.5e-6));
  CHECK(t.total_duration == doctest::Approx(50e-6));
  CHECK(t.rephasing_time == doctest::Approx(50e-6));
  REQUIRE(t.modes.size() == 100);
  for (int k = 0; k < 100; ++k) {
    CHECK(t.modes[k].centre == doctest::Approx((k + 0.5) * t.slot));
    CHECK(t.modes[k].fwhm == doctest::Approx(t.slot / 3.0));
  }

  try {
    make_mode_train(101, hz_to_rad(12e6), hz_to_rad(20e3), 0.0);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("N tau <= 2 pi / Delta - T0") != std::string::npos);
  }
  CHECK_THROWS_AS(make_mode_train(0, 10.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(make_mode_train(2, 10.0, 1.0, 0.0, {cplx(1.0)}), ConfigError);
  CHECK_THROWS_AS(make_mode_train(1, 1.0, 2.0, 0.0), ConfigError);
}

namespace {

CombParams scaled_comb(int n_modes) {
  const double delta = hz_to_rad(20e3);
  return CombParams::from_finesse(delta, 10.0, 6.0 * n_modes * delta, 40.0, 0.0, Envelope::square);
}

}  // namespace

TEST_CASE("single mode efficiency agrees with the storage run") {
  // The finite band advances the echo slightly; a template aligned to the
  // measured delay recovers the windowed energy.
  for (double d : {10.0, 40.0}) {
    CAPTURE(d);
    const double delta = hz_to_rad(20e3);
    CombParams p = CombParams::from_finesse(delta, 10.0, 12.0 * delta, d, 0.0, Envelope::square);
    ModeTrain t = make_mode_train(1, p.big_gamma, p.delta, 0.0);
    SimResult s = simulate_train(p, t, SimConfig{});
    const double offset = s.echo_delay - t.rephasing_time;
    CHECK(offset < 0.0);
    CrosstalkReport aligned = matched_filter_efficiencies(s.output_field, t, offset);
    CHECK(std::abs(aligned.per_mode_eta[0] / s.eta - 1.0) < 1e-3);
    CrosstalkReport nominal = matched_filter_efficiencies(s.output_field, t);
    CHECK(nominal.per_mode_eta[0] < aligned.per_mode_eta[0]);
    CHECK(std::abs(nominal.per_mode_eta[0] / s.eta - 1.0) < (d < 20.0 ? 0.01 : 0.015));
  }
}

TEST_CASE("silent output has zero efficiency") {
  ModeTrain t = make_mode_train(3, 18.0 * kTwoPi, kTwoPi, 0.0);
  FieldEnvelope zero(0.0, t.slot / 100.0, 400);
  CrosstalkReport r = matched_filter_efficiencies(zero, t);
  for (double e : r.per_mode_eta) CHECK(e == 0.0);
}

TEST_CASE("Eu-like train stores every mode alike and in order") {
  MultimodeRun run = run_eu_train(false, SimConfig{});
  const CrosstalkReport& r = run.report;
  const int n = run.train.n_modes;
  REQUIRE(n == 10);
  const double expected = 0.905;
  double worst = 0.0;
  for (double e : r.per_mode_eta) {
    CHECK(std::abs(e - expected) < 0.03);
    worst = std::max(worst, std::abs(e - r.mean_eta));
  }
  CHECK(worst < 0.01);
  CHECK(r.uniformity_std / r.mean_eta < 0.02);

  const double dt = run.result.dt;
  const double p = run.train.rephasing_time;
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < n; ++k) {
    const double off = r.centroid_out[k] - r.centroid_in[k] - p;
    lo = std::min(lo, off);
    hi = std::max(hi, off);
    CHECK(r.centroid_out[k] - p >= run.train.slot_start(k));
    CHECK(r.centroid_out[k] - p < run.train.slot_start(k + 1));
    if (k > 0) CHECK(r.centroid_out[k] > r.centroid_out[k - 1]);
  }
  CHECK(hi - lo < dt);

  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (j != k) CHECK(std::norm(r.overlap(k, j)) < 1e-3 * std::norm(r.overlap(k, k)));
    }
  }
  CHECK(r.max_crosstalk < 1e-3);
  CHECK(r.warnings.empty());
  CHECK(run.result.flags.empty());
}

TEST_CASE("modes superpose") {
  CombParams p = scaled_comb(3);
  const std::vector<cplx> a{cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
  const std::vector<cplx> b{cplx(0.0, 0.0), cplx(0.5, 0.5), cplx(-0.8, 0.0)};
  std::vector<cplx> ab(3);
  for (int k = 0; k < 3; ++k) ab[k] = a[k] + b[k];
  auto output = [&](const std::vector<cplx>& amp) {
    return simulate_train(p, make_mode_train(3, p.big_gamma, p.delta, 0.0, amp), SimConfig{}).output_field;
  };
  FieldEnvelope fa = output(a), fb = output(b), fab = output(ab);
  REQUIRE(fa.size() == fab.size());
  REQUIRE(fb.size() == fab.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < fab.size(); ++k) {
    worst = std::max(worst, std::abs(fab.samples[k] - fa.samples[k] - fb.samples[k]));
  }
  CHECK(worst < 1e-3 * fab.max_abs());
}

TEST_CASE("overlapping templates raise a warning") {
  // Slots narrower than the pulses: place modes by hand.
  ModeTrain t = make_mode_train(2, 12.0 * kTwoPi, kTwoPi, 0.0);
  for (auto& m : t.modes) m.fwhm = t.slot;
  FieldEnvelope out = t.as_pulse_train().sample(-1.0, t.slot / 200.0, 2000);
  CrosstalkReport r = matched_filter_efficiencies(shifted(out, t.rephasing_time), t);
  CHECK_FALSE(r.warnings.empty());
}
