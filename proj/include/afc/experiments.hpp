#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "afc/capacity.hpp"
#include "afc/comb.hpp"
#include "afc/multimode.hpp"
#include "afc/solver.hpp"

namespace afc {

/// Comb used for the efficiency figures: Delta = 2 pi x 20 kHz with a
/// Gaussian envelope Gamma = 40 Delta (297 lines kept at the default cutoff).
CombParams reference_comb(double peak_depth, double finesse, double delta0 = 0.0);

struct GridPoint {
  double d = 0.0;
  double finesse = 0.0;
  SimResult result;
  std::optional<ConvergenceReport> convergence;
};

/// Backward storage of the default input at each (d, F), optionally with a
/// convergence study. Points run concurrently; results keep input order.
std::vector<GridPoint> run_efficiency_grid(const std::vector<std::pair<double, double>>& points,
                                           const SimConfig& cfg, bool with_convergence);

/// The (d, F) pairs of the efficiency figure: {5, 10, 20, 40} x {4, 6, 10}.
std::vector<std::pair<double, double>> figure2_points();

struct MultimodeRun {
  CombParams params;
  ModeTrain train;
  SimResult result;
  CrosstalkReport report;
};

/// Eu-like train: square comb, Delta = 2 pi x 20 kHz, F = 10, d = 40. The
/// scaled version uses a 1.2 MHz band (10 modes), the full one 12 MHz (100 modes).
MultimodeRun run_eu_train(bool full_scale, const SimConfig& cfg);

/// Eu preset planned with gamma = 2 kHz and F = 10.
CapacityReport eu_capacity_report();

}  // namespace afc
