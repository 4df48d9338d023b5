#include "afc/experiments.hpp"

#include "afc/units.hpp"

#include <exception>

namespace afc {

namespace {

constexpr double kReferenceDeltaHz = 20e3;

}  // namespace

CombParams reference_comb(double peak_depth, double finesse, double delta0) {
  const double delta = hz_to_rad(kReferenceDeltaHz);
  return CombParams::from_finesse(delta, finesse, 40.0 * delta, peak_depth, delta0);
}

std::vector<std::pair<double, double>> figure2_points() {
  std::vector<std::pair<double, double>> pts;
  for (double f : {4.0, 6.0, 10.0}) {
    for (double d : {5.0, 10.0, 20.0, 40.0}) pts.emplace_back(d, f);
  }
  return pts;
}

std::vector<GridPoint> run_efficiency_grid(const std::vector<std::pair<double, double>>& points,
                                           const SimConfig& cfg, bool with_convergence) {
  std::vector<GridPoint> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      auto [d, f] = points[i];
      CombParams p = reference_comb(d, f);
      PulseTrain input = default_input(p);
      GridPoint g;
      g.d = d;
      g.finesse = f;
      g.result = simulate_storage(p, input, cfg);
      if (with_convergence) g.convergence = convergence_study(p, input, cfg);
      out[i] = std::move(g);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

MultimodeRun run_eu_train(bool full_scale, const SimConfig& cfg) {
  MultimodeRun run;
  const double delta = hz_to_rad(20e3);
  const double band = hz_to_rad(full_scale ? 12e6 : 1.2e6);
  run.params = CombParams::from_finesse(delta, 10.0, band, 40.0, 0.0, Envelope::square);
  run.train = make_mode_train(mode_capacity(band, delta, 0.0).n_modes, band, delta, 0.0);
  run.result = simulate_train(run.params, run.train, cfg);
  run.report = matched_filter_efficiencies(run.result.output_field, run.train, cfg.storage_time);
  return run;
}

CapacityReport eu_capacity_report() {
  PlanOptions opts;
  opts.gamma_hz = 2e3;
  opts.finesse = 10.0;
  return plan_memory(material_preset("eu_yso"), opts);
}

}  // namespace afc
