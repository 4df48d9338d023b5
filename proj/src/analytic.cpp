#include "afc/analytic.hpp"

#include "afc/error.hpp"
#include "afc/units.hpp"

#include <cmath>
#include <numbers>

namespace afc {

double transmitted_amplitude(double effective_depth) { return std::exp(-0.5 * effective_depth); }

double dephasing_amplitude(double finesse) {
  const double pi = std::numbers::pi;
  return std::exp(-pi * pi / (4.0 * std::numbers::ln2 * finesse * finesse));
}

std::complex<double> output_amplitude(const CombParams& params) {
  params.validate();
  const double f = finesse_of(params);
  const double d_eff = effective_depth(params.peak_depth, f);
  const double magnitude = -std::expm1(-d_eff) * dephasing_amplitude(f);
  return -std::polar(magnitude, -kTwoPi * params.delta0 / params.delta);
}

double efficiency_backward(double peak_depth, double finesse) {
  if (peak_depth < 0.0 || !(finesse > 0.0)) throw ConfigError("efficiency needs d >= 0 and F > 0");
  const double coupling = -std::expm1(-effective_depth(peak_depth, finesse));
  const double dephasing = dephasing_amplitude(finesse);
  return coupling * coupling * dephasing * dephasing;
}

double efficiency_forward(double effective_depth) {
  if (effective_depth < 0.0) throw ConfigError("effective depth must be >= 0");
  const double a = effective_depth * std::exp(-0.5 * effective_depth);
  return a * a;
}

double efficiency_forward(double effective_depth, double finesse) {
  const double dephasing = dephasing_amplitude(finesse);
  return efficiency_forward(effective_depth) * dephasing * dephasing;
}

OptimalFinesse optimal_finesse(double peak_depth) {
  if (!(peak_depth > 0.0)) throw ConfigError("optimal finesse needs d > 0");
  constexpr double lo = 1.0, hi = 100.0, step = 0.01;
  double best_f = lo, best_eta = efficiency_backward(peak_depth, lo);
  const int n = static_cast<int>(std::round((hi - lo) / step));
  for (int k = 1; k <= n; ++k) {
    double f = lo + k * step;
    double eta = efficiency_backward(peak_depth, f);
    if (eta > best_eta) {
      best_eta = eta;
      best_f = f;
    }
  }
  // The objective is unimodal in F, so golden-section within one scan step of the best node.
  double a = std::max(lo, best_f - step), b = std::min(hi, best_f + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = efficiency_backward(peak_depth, c), fd = efficiency_backward(peak_depth, d);
  while (b - a > 1e-9) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = efficiency_backward(peak_depth, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = efficiency_backward(peak_depth, d);
    }
  }
  double f = 0.5 * (a + b);
  double eta = efficiency_backward(peak_depth, f);
  if (eta < best_eta) return {best_f, best_eta};
  return {f, eta};
}

double output_phase(double delta0, double delta) {
  if (!(delta > 0.0)) throw ConfigError("peak separation must be > 0");
  // Reduce delta0 modulo delta first so integer shifts map to the same phase exactly.
  double frac = delta0 / delta;
  frac -= std::floor(frac);
  return wrap_phase(std::numbers::pi - kTwoPi * frac);
}

}  // namespace afc
