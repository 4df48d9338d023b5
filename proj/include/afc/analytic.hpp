#pragma once

#include <complex>

#include "afc/comb.hpp"

namespace afc {

enum class Retrieval { backward, forward };

struct EfficiencyPoint {
  double d = 0.0;
  double finesse = 0.0;
  double eta = 0.0;
  Retrieval mode = Retrieval::backward;
};

/// Amplitude transmission exp(-d_eff / 2) of a broadband pulse.
double transmitted_amplitude(double effective_depth);

/// Rephasing dephasing factor on the amplitude, exp(-pi^2 / (4 ln 2 F^2)).
double dephasing_amplitude(double finesse);

/// Complex ratio E_out / E_in for backward retrieval from an infinite comb.
std::complex<double> output_amplitude(const CombParams& params);

/// (1 - exp(-d_eff))^2 exp(-pi^2 / (2 ln 2 F^2)).
double efficiency_backward(double peak_depth, double finesse);

/// Depth-only forward re-emission factor (d_eff exp(-d_eff / 2))^2.
double efficiency_forward(double effective_depth);

/// Forward factor including the comb dephasing of the given finesse.
double efficiency_forward(double effective_depth, double finesse);

struct OptimalFinesse {
  double finesse = 0.0;
  double eta = 0.0;
};

/// Maximises efficiency_backward over F in [1, 100] (dense scan, then
/// golden-section refinement). Requires d > 0.
OptimalFinesse optimal_finesse(double peak_depth);

/// pi - 2 pi delta0 / delta, wrapped to (-pi, pi].
double output_phase(double delta0, double delta);

}  // namespace afc
