#include "afc/multimode.hpp"

#include "afc/error.hpp"
#include "afc/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace afc {

namespace {

double slot_width(double big_gamma) { return 6.0 * kTwoPi / big_gamma; }

// Intensity FWHM of one mode as a fraction of its slot.
constexpr double kModeFwhmPerSlot = 1.0 / 3.0;

}  // namespace

ModeCapacity mode_capacity(double big_gamma, double delta, double control_time) {
  ModeCapacity c;
  c.n_peaks = big_gamma / delta;
  c.approx = c.n_peaks / 6.0;
  double x = (kTwoPi / delta - control_time) / slot_width(big_gamma);
  // Exact ratios such as 100 must not be lost to round-off.
  c.n_modes = x > 0.0 ? static_cast<int>(std::floor(x * (1.0 + 1e-12))) : 0;
  return c;
}

ModeTrain make_mode_train(int n_modes, double big_gamma, double delta, double control_time,
                          const std::vector<cplx>& amplitudes) {
  if (!(big_gamma > delta) || !(delta > 0.0)) throw ConfigError("mode train needs Gamma > Delta > 0");
  if (!(control_time >= 0.0)) throw ConfigError("control time T0 must be >= 0");
  if (n_modes < 1) throw ConfigError("mode train needs at least one mode");
  if (!amplitudes.empty() && amplitudes.size() != static_cast<std::size_t>(n_modes)) {
    throw ConfigError("expected " + std::to_string(n_modes) + " mode amplitudes, got " +
                      std::to_string(amplitudes.size()));
  }
  ModeTrain t;
  t.n_modes = n_modes;
  t.slot = slot_width(big_gamma);
  t.total_duration = n_modes * t.slot;
  t.rephasing_time = kTwoPi / delta;
  t.control_time = control_time;
  const double budget = t.rephasing_time - control_time;
  if (n_modes > mode_capacity(big_gamma, delta, control_time).n_modes) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "N tau <= 2 pi / Delta - T0 violated: " << n_modes << " x " << t.slot << " s = "
        << t.total_duration << " s > " << budget << " s";
    throw ConfigError(msg.str());
  }
  for (int k = 0; k < n_modes; ++k) {
    cplx a = amplitudes.empty() ? cplx(1.0) : amplitudes[k];
    t.modes.push_back(GaussianPulse{(k + 0.5) * t.slot, kModeFwhmPerSlot * t.slot, a});
  }
  return t;
}

CrosstalkReport matched_filter_efficiencies(const FieldEnvelope& output, const ModeTrain& train,
                                            double extra_delay) {
  const int n = train.n_modes;
  const double delay = train.rephasing_time + extra_delay;
  CrosstalkReport rep;
  rep.per_mode_eta.assign(n, 0.0);
  rep.centroid_in.assign(n, 0.0);
  rep.centroid_out.assign(n, 0.0);
  rep.overlap_matrix.assign(static_cast<std::size_t>(n) * n, 0.0);

  // Unit-energy templates.
  std::vector<GaussianPulse> tmpl(n);
  for (int k = 0; k < n; ++k) {
    GaussianPulse g = train.modes[k];
    g.amplitude = 1.0;
    g.amplitude = 1.0 / std::sqrt(g.energy());
    g.centre += delay;
    tmpl[k] = g;
    rep.centroid_in[k] = train.modes[k].centre;
  }

  for (int k = 0; k < n; ++k) {
    cplx full = 0.0;
    for (std::size_t s = 0; s < output.size(); ++s) {
      double t = output.time(s);
      cplx v = std::conj(tmpl[k](t)) * output.samples[s];
      full += v;
      int j = static_cast<int>(std::floor((t - delay) / train.slot));
      if (j >= 0 && j < n) rep.overlap_matrix[static_cast<std::size_t>(k) * n + j] += v * output.dt;
    }
    full *= output.dt;
    double e_k = train.modes[k].energy();
    rep.per_mode_eta[k] = e_k > 0.0 ? std::norm(full) / e_k : 0.0;
    double lo = delay + train.slot_start(k);
    double c = output.centroid(lo, lo + train.slot);
    rep.centroid_out[k] = std::isnan(c) ? c : c - extra_delay;
  }

  double sum = 0.0;
  for (double e : rep.per_mode_eta) sum += e;
  rep.mean_eta = sum / n;
  double var = 0.0;
  for (double e : rep.per_mode_eta) var += (e - rep.mean_eta) * (e - rep.mean_eta);
  rep.uniformity_std = std::sqrt(var / n);

  for (int k = 0; k < n; ++k) {
    double diag = std::norm(rep.overlap(k, k));
    for (int j = 0; j < n; ++j) {
      if (j == k || !(diag > 0.0)) continue;
      rep.max_crosstalk = std::max(rep.max_crosstalk, std::norm(rep.overlap(k, j)) / diag);
    }
  }

  // Energy overlap of neighbouring unit templates.
  for (int k = 0; k + 1 < n; ++k) {
    const GaussianPulse& a = tmpl[k];
    const GaussianPulse& b = tmpl[k + 1];
    double h = std::min(a.fwhm, b.fwhm) / 50.0;
    double lo = std::min(a.centre - 5.0 * a.fwhm, b.centre - 5.0 * b.fwhm);
    double hi = std::max(a.centre + 5.0 * a.fwhm, b.centre + 5.0 * b.fwhm);
    cplx acc = 0.0;
    for (double t = lo; t <= hi; t += h) acc += std::conj(a(t)) * b(t);
    double e = std::norm(acc * h);
    if (e >= 0.01) {
      std::ostringstream msg;
      msg << "templates " << k << " and " << k + 1 << " overlap by " << e << " in energy";
      rep.warnings.push_back(msg.str());
    }
  }
  return rep;
}

SimConfig train_config(const ModeTrain& train, SimConfig base) {
  base.flip_time = train.total_duration + 0.5 * train.control_time;
  base.t_end = train.rephasing_time + train.total_duration + 0.5 * train.slot;
  base.echo_window = 0.5 * train.total_duration;
  return base;
}

SimResult simulate_train(const CombParams& params, const ModeTrain& train, const SimConfig& cfg) {
  return simulate_storage(params, train.as_pulse_train(), train_config(train, cfg));
}

}  // namespace afc
