#include <doctest.h>

#include "afc/analytic.hpp"
#include "afc/capacity.hpp"
#include "afc/error.hpp"
#include "afc/experiments.hpp"

#include <cmath>
#include <numbers>

using namespace afc;

TEST_CASE("Eu example plan") {
  CapacityReport r = eu_capacity_report();
  CHECK(r.peak_sep_hz == doctest::Approx(20e3));
  CHECK(r.n_peaks == 600);
  CHECK(r.n_modes == 100);
  CHECK(r.tau_s == doctest::Approx(5e-7));
  CHECK(r.total_s == doctest::Approx(50e-6));
  CHECK(r.d_crib_equiv == doctest::Approx(3000.0));
  CHECK(r.eta_pred == doctest::Approx(0.9051078).epsilon(1e-6));
  CHECK(r.feasible);
}

TEST_CASE("default plan uses the optimal finesse") {
  CapacityReport r = plan_memory(material_preset("eu_yso"));
  CHECK(r.peak_width_hz == doctest::Approx(1220.0));
  CHECK(r.finesse == doctest::Approx(optimal_finesse(40.0).finesse));
  CHECK(r.eta_pred == doctest::Approx(optimal_finesse(40.0).eta));
  CHECK(r.n_peaks == static_cast<int>(12e6 / r.peak_sep_hz));
}

TEST_CASE("target efficiency") {
  PlanOptions o;
  o.target_eta = 0.8;
  CapacityReport r = plan_memory(material_preset("eu_yso"), o);
  CHECK(r.feasible);
  CHECK(r.eta_pred == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(r.finesse < optimal_finesse(40.0).finesse);
  CHECK(r.n_modes >= plan_memory(material_preset("eu_yso")).n_modes);

  o.target_eta = 0.95;
  CapacityReport bad = plan_memory(material_preset("eu_yso"), o);
  CHECK_FALSE(bad.feasible);
  CHECK_FALSE(bad.note.empty());
  CHECK(bad.finesse == doctest::Approx(optimal_finesse(40.0).finesse));
}

TEST_CASE("zero depth") {
  PlanOptions o;
  o.d_available = 0.0;
  CapacityReport r = plan_memory(material_preset("eu_yso"), o);
  CHECK(r.eta_pred == 0.0);
  CHECK(r.finesse == doctest::Approx(std::numbers::pi / std::sqrt(2.0 * std::numbers::ln2)));
  o.target_eta = 0.1;
  CHECK_FALSE(plan_memory(material_preset("eu_yso"), o).feasible);
}

TEST_CASE("plan invariants") {
  for (double d : {2.0, 10.0, 40.0, 100.0}) {
    for (double t0 : {0.0, 1e-6, 10e-6}) {
      PlanOptions o;
      o.d_available = d;
      o.control_time_s = t0;
      CapacityReport r = plan_memory(material_preset("eu_yso"), o);
      CHECK(r.peak_width_hz >= 122.0);
      CHECK(r.peak_sep_hz == doctest::Approx(r.finesse * r.peak_width_hz));
      CHECK(r.n_modes * r.tau_s <= 1.0 / r.peak_sep_hz - t0 + 1e-15);
      CHECK(r.n_modes >= 0);
      CHECK(r.eta_pred <= 1.0);
      CHECK(r.d_crib_equiv == 30.0 * r.n_modes);
    }
  }
}

TEST_CASE("plan rejects bad inputs") {
  PlanOptions narrow;
  narrow.gamma_hz = 50.0;
  CHECK_THROWS_AS(plan_memory(material_preset("eu_yso"), narrow), ConfigError);
  CHECK_THROWS_AS(plan_memory(material_preset("pr_yso")), ConfigError);
  CHECK_THROWS_AS(plan_memory(material_preset("tm_yag")), ConfigError);
  CHECK_THROWS_AS(material_preset("nd_yvo"), ConfigError);
  CHECK_THROWS_AS(crib_equivalent_depth(-1), ConfigError);
  PlanOptions target;
  target.target_eta = 1.5;
  CHECK_THROWS_AS(plan_memory(material_preset("eu_yso"), target), ConfigError);

  MaterialSpec m = material_preset("eu_yso");
  m.gamma_inh_hz = 1e6;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("material presets round-trip through JSON") {
  for (const MaterialSpec& m : material_presets()) {
    nlohmann::json j = m;
    MaterialSpec back = j.get<MaterialSpec>();
    CHECK(back == m);
    CHECK(nlohmann::json::parse(j.dump()).get<MaterialSpec>() == m);
  }
  nlohmann::json eu = material_preset("eu_yso");
  CHECK(eu["gamma_inh_hz"].is_null());
  CHECK(eu["spin_coherence"].size() == 2);
}
