#include "afc/solver.hpp"

#include "afc/error.hpp"
#include "afc/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace afc {

namespace {

using Clock = std::chrono::steady_clock;

// Grid index of time t (t on or just past the grid).
std::size_t steps_until(double t0, double dt, double t) {
  double n = (t - t0) / dt;
  return n <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(n - 1e-9));
}

cplx input_sample(const FieldEnvelope& input, std::size_t k) {
  return k < input.size() ? input.samples[k] : cplx(0.0);
}

void check_amplitude(std::span<const cplx> field, double limit, const char* stage, double t) {
  for (const cplx& e : field) {
    if (!(std::abs(e) <= limit)) {
      throw NumericalError("solver", std::string(stage) + " field grew beyond 10x the input amplitude at t=" +
                                         std::to_string(t) + "; reduce dt or increase nz");
    }
  }
}

}  // namespace

int auto_nz(double effective_depth) {
  return std::max(48, static_cast<int>(std::ceil(16.0 * effective_depth)) + 1);
}

double calibrate_coupling(DiscretizedComb& comb, double peak_depth, bool verify) {
  if (peak_depth < 0.0) throw ConfigError("peak depth must be >= 0");
  if (peak_depth == 0.0) {
    comb.coupling = 0.0;
    return 0.0;
  }
  if (!(comb.line_density > 0.0)) throw ConfigError("comb carries no line density to calibrate against");
  // A monochromatic probe on a line centre decays as exp(-pi kappa n z).
  comb.coupling = peak_depth / (2.0 * std::numbers::pi * comb.line_density * comb.length);
  if (verify) {
    double measured = cw_line_transmission(comb);
    double target = std::exp(-0.5 * peak_depth);
    if (std::abs(measured / target - 1.0) > 1e-3) {
      throw NumericalError("solver", "coupling calibration missed: line-centre transmission " +
                                         std::to_string(measured) + " vs " + std::to_string(target));
    }
  }
  return comb.coupling;
}

double cw_line_transmission(const DiscretizedComb& comb) {
  const double s = comb.line_sigma;
  if (!(s > 0.0)) throw ConfigError("comb has no line width");
  // Central line alone on a uniform grid fine enough that its recurrence time
  // 2 pi / h exceeds the run.
  DiscretizedComb line;
  line.length = comb.length;
  line.coupling = comb.coupling;
  const double h = 0.05 * s;
  for (int k = -120; k <= 120; ++k) {
    double u = k * 0.05;
    line.detunings.push_back(k * h);
    line.weights.push_back(comb.line_density * std::exp(-0.5 * u * u) * h);
  }
  const double depth = 2.0 * std::numbers::pi * comb.coupling * comb.line_density * comb.length;
  const int nz = std::max(64, static_cast<int>(std::ceil(std::sqrt(depth * depth * depth / 0.02))));

  const double dt = 0.1 / s;
  const double t_on = 20.0 / s, width = 10.0 / s, t_measure = 60.0 / s;
  Propagator prop(line, nz, dt, Direction::forward);
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_measure / dt));
  cplx probe = 0.0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    double t = n * dt;
    probe = 0.5 * (1.0 + std::erf((t - t_on) / width));
    prop.step(probe);
  }
  return std::abs(prop.exit_field()) / std::abs(probe);
}

double excitation_norm(const AtomicState& state, const DiscretizedComb& comb) {
  if (state.bins != comb.size()) throw ConfigError("state and comb disagree on the number of bins");
  if (state.nz < 2) return 0.0;
  const double dz = comb.length / (state.nz - 1);
  double total = 0.0;
  for (int j = 0; j < state.nz; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < state.bins; ++i) row += comb.weights[i] * std::norm(state.at(j, i));
    total += (j == 0 || j == state.nz - 1 ? 0.5 : 1.0) * row;
  }
  return comb.coupling * total * dz;
}

ForwardRun propagate_forward(const FieldEnvelope& input, const DiscretizedComb& comb, int nz,
                             double stop_time, KernelKind kernel, std::optional<double> snapshot_time) {
  if (input.size() == 0 || !(input.dt > 0.0)) throw ConfigError("input field is empty");
  Propagator prop(comb, nz, input.dt, Direction::forward, kernel);
  const std::size_t n_bins = comb.size();
  std::vector<cplx> field(nz, input.samples[0]);
  prop.load(std::vector<cplx>(static_cast<std::size_t>(nz) * n_bins, 0.0), field);

  const double limit = 10.0 * input.max_abs();
  const std::size_t n_steps = steps_until(input.t0, input.dt, stop_time);
  const std::size_t snap_at =
      snapshot_time ? steps_until(input.t0, input.dt, *snapshot_time) : static_cast<std::size_t>(-1);

  ForwardRun run;
  run.transmitted = FieldEnvelope(input.t0, input.dt, n_steps + 1);
  run.transmitted.samples[0] = prop.exit_field();
  auto capture = [&](std::size_t n) {
    AtomicState st;
    st.nz = nz;
    st.bins = n_bins;
    st.coherences = prop.coherences();
    st.direction = Direction::forward;
    st.time = input.time(n);
    return st;
  };
  if (snap_at == 0) run.snapshot = capture(0);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    prop.step(input_sample(input, n));
    check_amplitude(prop.field(), limit, "forward", input.time(n));
    run.transmitted.samples[n] = prop.exit_field();
    if (n == snap_at) run.snapshot = capture(n);
  }
  run.state = capture(n_steps);
  return run;
}

AtomicState flip_to_backward(const AtomicState& state, double spin_loss) {
  if (state.direction != Direction::forward) throw ConfigError("coherences were already transferred to the backward mode");
  if (!(spin_loss >= 0.0 && spin_loss <= 1.0)) throw ConfigError("spin_loss must lie in [0, 1]");
  AtomicState out = state;
  out.direction = Direction::backward;
  for (cplx& c : out.coherences) c *= spin_loss;
  return out;
}

FieldEnvelope propagate_backward(const AtomicState& state, const DiscretizedComb& comb, double dt,
                                 double t_end, KernelKind kernel, double amplitude_limit,
                                 AtomicState* final_state) {
  if (state.direction != Direction::backward) throw ConfigError("backward propagation needs a flipped state");
  Propagator prop(comb, state.nz, dt, Direction::backward, kernel);
  prop.load(state.coherences, std::vector<cplx>(state.nz, 0.0));
  const std::size_t n_steps = steps_until(state.time, dt, t_end);
  FieldEnvelope out(state.time, dt, n_steps + 1);
  out.samples[0] = prop.exit_field();
  for (std::size_t n = 1; n <= n_steps; ++n) {
    prop.step(0.0);
    check_amplitude(prop.field(), amplitude_limit, "backward", out.time(n));
    out.samples[n] = prop.exit_field();
  }
  if (final_state) {
    final_state->nz = state.nz;
    final_state->bins = state.bins;
    final_state->coherences = prop.coherences();
    final_state->direction = Direction::backward;
    final_state->time = out.t_end();
  }
  return out;
}

PulseTrain default_input(const CombParams& params) {
  double bandwidth = 10.0 * params.delta;
  if (std::isfinite(params.big_gamma)) bandwidth = std::min(bandwidth, params.big_gamma / 5.0);
  return PulseTrain{{pulse_from_bandwidth(bandwidth, 0.0)}};
}

TimeGrid input_grid(const CombParams& params, const PulseTrain& input, const SimConfig& cfg) {
  if (input.pulses.empty()) throw ConfigError("input has no pulses");
  const double period = kTwoPi / params.delta;
  const double fwhm = input.shortest_fwhm();
  TimeGrid g;
  if (cfg.dt > 0.0) {
    g.dt = cfg.dt;
  } else {
    if (!(cfg.samples_per_fwhm > 0.0)) throw ConfigError("samples_per_fwhm must be > 0");
    g.dt = period / std::ceil(period * cfg.samples_per_fwhm / fwhm);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : input.pulses) {
    lo = std::min(lo, p.centre - 4.0 * p.fwhm);
    hi = std::max(hi, p.centre + 4.0 * p.fwhm);
  }
  g.t0 = lo;
  g.n = static_cast<std::size_t>(std::ceil((hi - lo) / g.dt)) + 1;
  return g;
}

namespace {

struct RunSetup {
  DiscretizedComb comb;
  int nz = 0;
  double period = 0.0;
  double input_centre = 0.0;
  double input_fwhm = 0.0;
  double window = 0.0;
  double t_end = 0.0;
  double input_energy = 0.0;
  std::vector<std::string> flags;
};

RunSetup prepare(const CombParams& params, const FieldEnvelope& input, const SimConfig& cfg) {
  params.validate();
  if (input.size() == 0 || !(input.dt > 0.0)) throw ConfigError("input field is empty");
  if (cfg.dt > 0.0 && std::abs(cfg.dt / input.dt - 1.0) > 1e-9) {
    throw ConfigError("configured dt does not match the input sampling");
  }
  RunSetup s;
  s.input_energy = input.energy();
  if (!(s.input_energy > 0.0) || !std::isfinite(s.input_energy)) throw ConfigError("input field carries no energy");
  if (!params.well_separated()) s.flags.push_back("out_of_regime");

  const double finesse = finesse_of(params);
  s.comb = discretize_comb(params, 1.0, cfg.nodes_per_peak, cfg.peak_cutoff);
  calibrate_coupling(s.comb, params.peak_depth, cfg.verify_calibration);
  s.nz = cfg.nz > 0 ? cfg.nz : auto_nz(effective_depth(params.peak_depth, finesse));
  if (s.nz < 16) throw ConfigError("nz must be >= 16");

  s.period = kTwoPi / params.delta;
  s.input_centre = input.centroid();
  s.input_fwhm = cfg.pulse_fwhm > 0.0 ? cfg.pulse_fwhm : input.rms_fwhm();
  if (s.input_fwhm / input.dt < 20.0) s.flags.push_back("under_resolved_dt");
  if (s.input_fwhm > 0.0) {
    // Spectral FWHM of a transform-limited Gaussian with this duration.
    double bandwidth = 4.0 * std::numbers::ln2 / s.input_fwhm;
    if (bandwidth <= params.delta || bandwidth >= params.big_gamma) s.flags.push_back("pulse_out_of_band");
  }
  s.window = cfg.echo_window > 0.0 ? cfg.echo_window : 5.0 * s.input_fwhm;
  s.t_end = cfg.t_end > 0.0 ? cfg.t_end : s.input_centre + s.period + 1.2 * s.window;
  return s;
}

double template_phase(const FieldEnvelope& input, const FieldEnvelope& output, double delay,
                      double lo, double hi) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < output.size(); ++k) {
    double t = output.time(k);
    if (t < lo || t > hi) continue;
    acc += std::conj(input.at(t - delay)) * output.samples[k];
  }
  return std::arg(acc);
}

}  // namespace

SimResult simulate_storage(const CombParams& params, const FieldEnvelope& input, const SimConfig& cfg) {
  const auto start = Clock::now();
  RunSetup s = prepare(params, input, cfg);
  const double flip = cfg.flip_time.value_or(s.input_centre + 0.5 * s.period);
  if (!(flip > input.t0) || !(flip - s.input_centre < s.period)) {
    throw ConfigError("flip_time must fall after the input starts and within 2 pi / Delta of its centre");
  }

  ForwardRun fwd = propagate_forward(input, s.comb, s.nz, flip, cfg.kernel);
  const double absorbed_input = input.energy_between(input.t0, fwd.state.time);
  const double stored = excitation_norm(fwd.state, s.comb);

  AtomicState backward = flip_to_backward(fwd.state, cfg.spin_loss);
  AtomicState after;
  FieldEnvelope out = propagate_backward(backward, s.comb, input.dt, s.t_end, cfg.kernel,
                                         10.0 * input.max_abs(), &after);

  const double echo_time = s.input_centre + s.period;
  const double lo = echo_time - s.window, hi = echo_time + s.window;

  SimResult r;
  r.input_energy = s.input_energy;
  r.eta = out.energy_between(lo, hi) / s.input_energy;
  r.stored_fraction = stored / s.input_energy;
  r.energy_balance_residual =
      (absorbed_input - fwd.transmitted.energy() - stored) / std::max(absorbed_input, 1e-300);
  r.residual_fraction = excitation_norm(after, s.comb) / s.input_energy;
  double centroid = out.centroid(lo, hi);
  r.echo_delay = centroid - s.input_centre;
  r.echo_peak_time = centroid + cfg.storage_time;
  r.output_phase = wrap_phase(template_phase(input, out, s.period, lo, hi));
  r.analytic_eta = efficiency_backward(params.peak_depth, finesse_of(params)) * cfg.spin_loss * cfg.spin_loss;
  out.t0 += cfg.storage_time;
  r.output_field = std::move(out);
  r.transmitted_field = std::move(fwd.transmitted);
  r.nz = s.nz;
  r.bins = s.comb.size();
  r.dt = input.dt;
  r.flags = std::move(s.flags);
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

SimResult forward_echo(const CombParams& params, const FieldEnvelope& input, const SimConfig& cfg) {
  if (cfg.flip_time) throw ConfigError("forward-echo runs take no flip_time");
  const auto start = Clock::now();
  RunSetup s = prepare(params, input, cfg);
  const double mid = s.input_centre + 0.5 * s.period;
  ForwardRun fwd = propagate_forward(input, s.comb, s.nz, s.t_end, cfg.kernel, mid);

  const double echo_time = s.input_centre + s.period;
  const double lo = echo_time - s.window, hi = echo_time + s.window;

  SimResult r;
  r.input_energy = s.input_energy;
  r.eta = fwd.transmitted.energy_between(lo, hi) / s.input_energy;
  if (fwd.snapshot) {
    const double stored = excitation_norm(*fwd.snapshot, s.comb);
    const double absorbed_input = input.energy_between(input.t0, fwd.snapshot->time);
    r.stored_fraction = stored / s.input_energy;
    r.energy_balance_residual =
        (absorbed_input - fwd.transmitted.energy_between(input.t0, fwd.snapshot->time) - stored) /
        std::max(absorbed_input, 1e-300);
  }
  r.residual_fraction = excitation_norm(fwd.state, s.comb) / s.input_energy;
  double centroid = fwd.transmitted.centroid(lo, hi);
  r.echo_delay = centroid - s.input_centre;
  r.echo_peak_time = centroid + cfg.storage_time;
  r.output_phase = wrap_phase(template_phase(input, fwd.transmitted, s.period, lo, hi));
  const double finesse = finesse_of(params);
  r.analytic_eta = efficiency_forward(effective_depth(params.peak_depth, finesse), finesse);
  r.transmitted_field = std::move(fwd.transmitted);
  r.nz = s.nz;
  r.bins = s.comb.size();
  r.dt = input.dt;
  r.flags = std::move(s.flags);
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

namespace {

SimResult run_train(const CombParams& params, const PulseTrain& input, const SimConfig& cfg,
                    Retrieval retrieval) {
  TimeGrid g = input_grid(params, input, cfg);
  FieldEnvelope sampled = input.sample(g.t0, g.dt, g.n);
  SimConfig c = cfg;
  c.dt = g.dt;
  if (c.pulse_fwhm <= 0.0) c.pulse_fwhm = input.shortest_fwhm();
  return retrieval == Retrieval::backward ? simulate_storage(params, sampled, c)
                                          : forward_echo(params, sampled, c);
}

SimResult run_checked(const CombParams& params, const PulseTrain& input, const SimConfig& cfg,
                      Retrieval retrieval) {
  SimConfig base = cfg;
  base.convergence_check = false;
  SimResult r = run_train(params, input, base, retrieval);
  if (cfg.convergence_check) {
    ConvergenceReport rep = convergence_study(params, input, base, retrieval);
    if (!rep.passed) r.flags.push_back("not_converged:" + rep.failing_axis);
  }
  return r;
}

}  // namespace

SimResult simulate_storage(const CombParams& params, const PulseTrain& input, const SimConfig& cfg) {
  return run_checked(params, input, cfg, Retrieval::backward);
}

SimResult forward_echo(const CombParams& params, const PulseTrain& input, const SimConfig& cfg) {
  return run_checked(params, input, cfg, Retrieval::forward);
}

ConvergenceReport convergence_study(const CombParams& params, const PulseTrain& input,
                                    const SimConfig& cfg, Retrieval retrieval, double tol) {
  SimConfig base = cfg;
  base.convergence_check = false;
  const TimeGrid g = input_grid(params, input, base);
  base.dt = g.dt;
  base.nz = cfg.nz > 0 ? cfg.nz : auto_nz(effective_depth(params.peak_depth, finesse_of(params)));

  ConvergenceReport rep;
  rep.eta = run_train(params, input, base, retrieval).eta;

  SimConfig fine_t = base;
  fine_t.dt = 0.5 * base.dt;
  fine_t.verify_calibration = false;
  rep.delta_dt = std::abs(run_train(params, input, fine_t, retrieval).eta - rep.eta);

  SimConfig fine_z = base;
  fine_z.nz = 2 * (base.nz - 1) + 1;
  fine_z.verify_calibration = false;
  rep.delta_dz = std::abs(run_train(params, input, fine_z, retrieval).eta - rep.eta);

  SimConfig fine_q = base;
  fine_q.nodes_per_peak = 2 * base.nodes_per_peak;
  fine_q.verify_calibration = false;
  rep.delta_nodes = std::abs(run_train(params, input, fine_q, retrieval).eta - rep.eta);

  const double worst = std::max({rep.delta_dt, rep.delta_dz, rep.delta_nodes});
  rep.passed = worst < tol;
  if (!rep.passed) {
    rep.failing_axis = worst == rep.delta_dt ? "dt" : (worst == rep.delta_dz ? "dz" : "nodes");
  }
  return rep;
}

}  // namespace afc
