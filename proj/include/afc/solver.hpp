#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "afc/analytic.hpp"
#include "afc/comb.hpp"
#include "afc/field.hpp"
#include "afc/kernel.hpp"

namespace afc {

/// Coherence array sigma(z_j; delta_i) at one instant.
struct AtomicState {
  int nz = 0;
  std::size_t bins = 0;
  std::vector<cplx> coherences;  // row-major, nz x bins
  Direction direction = Direction::forward;
  double time = 0.0;

  cplx at(int j, std::size_t i) const { return coherences[static_cast<std::size_t>(j) * bins + i]; }
};

struct SimConfig {
  int nz = 0;                       // 0: chosen from the effective depth
  double samples_per_fwhm = 25.0;   // time resolution of the shortest input pulse
  double dt = 0.0;                  // 0: derived from samples_per_fwhm (only for generated inputs)
  double t_end = 0.0;               // 0: end of the echo window plus margin
  std::optional<double> flip_time;  // absent: forward-echo run
  double echo_window = 0.0;         // half width around the expected echo; 0: 5 pulse FWHM
  double pulse_fwhm = 0.0;          // pulse duration for flags and window; 0: RMS width of the input
  bool convergence_check = false;
  double spin_loss = 1.0;           // amplitude factor applied at the flip
  double storage_time = 0.0;        // T_s; shifts reported output times only
  int nodes_per_peak = 7;
  double peak_cutoff = 1e-3;
  KernelKind kernel = KernelKind::parallel;
  bool verify_calibration = true;
};

struct SimResult {
  double eta = 0.0;
  FieldEnvelope output_field;       // backward field at z = 0 (forward runs: empty)
  FieldEnvelope transmitted_field;  // forward field at z = L
  double echo_peak_time = 0.0;      // centroid of the echo, including storage_time
  double echo_delay = 0.0;          // echo centroid minus input centroid
  double output_phase = 0.0;        // arg <template | output>
  double energy_balance_residual = 0.0;
  double input_energy = 0.0;
  double stored_fraction = 0.0;     // excitation norm / input energy at the flip
  double residual_fraction = 0.0;   // excitation norm / input energy at the end
  double analytic_eta = 0.0;
  int nz = 0;
  std::size_t bins = 0;
  double dt = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> flags;   // e.g. "out_of_regime", "under_resolved_dt"
};

/// Sets comb.coupling so that a weak monochromatic probe on a line centre is
/// attenuated to exp(-d/2) in amplitude over comb.length, from the line
/// density carried by the discretisation. With `verify`, a slowly switched-on
/// probe is propagated through a finely resolved copy of the central line and
/// NumericalError is thrown if its transmission misses exp(-d/2) by more than
/// 1e-3 relative.
double calibrate_coupling(DiscretizedComb& comb, double peak_depth, bool verify = true);

/// Measured steady-state amplitude transmission of a line-centre probe
/// through `comb`'s central line (the verification run of calibrate_coupling).
double cw_line_transmission(const DiscretizedComb& comb);

/// Number of spatial points used when SimConfig::nz is 0.
int auto_nz(double effective_depth);

/// Field-normalised excitation (kappa / mu) * integral dz sum_i w_i |sigma_i|^2.
double excitation_norm(const AtomicState& state, const DiscretizedComb& comb);

struct ForwardRun {
  FieldEnvelope transmitted;
  AtomicState state;             // at stop_time
  std::optional<AtomicState> snapshot;
};

/// Forward absorption from input.t0 until `stop_time` on the input's time grid.
/// Input samples past the end of `input` are taken as zero. A copy of the
/// coherences is kept at the first grid time >= snapshot_time, if given.
/// Throws NumericalError when |E| exceeds ten times the peak input amplitude.
ForwardRun propagate_forward(const FieldEnvelope& input, const DiscretizedComb& comb, int nz,
                             double stop_time, KernelKind kernel = KernelKind::parallel,
                             std::optional<double> snapshot_time = std::nullopt);

/// Ideal instantaneous forward -> backward transfer scaled by spin_loss.
AtomicState flip_to_backward(const AtomicState& state, double spin_loss);

/// Backward re-emission from state.time until t_end; returns E_b(z = 0, t).
/// Throws NumericalError when |E| exceeds amplitude_limit.
FieldEnvelope propagate_backward(const AtomicState& state, const DiscretizedComb& comb, double dt,
                                 double t_end, KernelKind kernel = KernelKind::parallel,
                                 double amplitude_limit = std::numeric_limits<double>::infinity(),
                                 AtomicState* final_state = nullptr);

/// Default single input pulse: spectral FWHM min(Gamma/5, 10 Delta), centred at t = 0.
PulseTrain default_input(const CombParams& params);

struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t n = 0;
};

/// Grid starting 4 FWHM before the first pulse, with a step that divides
/// 2 pi / Delta and resolves the shortest pulse by cfg.samples_per_fwhm.
TimeGrid input_grid(const CombParams& params, const PulseTrain& input, const SimConfig& cfg);

/// Absorb, flip, retrieve backward. cfg.flip_time defaults to halfway between
/// the input and its echo. eta is the output energy in the echo window over the input energy.
SimResult simulate_storage(const CombParams& params, const FieldEnvelope& input, const SimConfig& cfg);
SimResult simulate_storage(const CombParams& params, const PulseTrain& input, const SimConfig& cfg);

/// No flip: forward propagation through the first rephasing; eta from the
/// transmitted energy in the echo window.
SimResult forward_echo(const CombParams& params, const FieldEnvelope& input, const SimConfig& cfg);
SimResult forward_echo(const CombParams& params, const PulseTrain& input, const SimConfig& cfg);

struct ConvergenceReport {
  double eta = 0.0;
  double delta_dt = 0.0;     // |eta(dt/2) - eta|
  double delta_dz = 0.0;     // |eta(dz/2) - eta|
  double delta_nodes = 0.0;  // |eta(2 nodes_per_peak) - eta|
  bool passed = false;
  std::string failing_axis;  // "dt", "dz", "nodes" or empty
};

/// Reruns with halved dt, halved dz and doubled nodes per peak; passes when every |delta eta| < tol.
ConvergenceReport convergence_study(const CombParams& params, const PulseTrain& input,
                                    const SimConfig& cfg, Retrieval retrieval = Retrieval::backward,
                                    double tol = 1e-3);

}  // namespace afc
