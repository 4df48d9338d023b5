#pragma once

#include <string>
#include <vector>

#include "afc/comb.hpp"
#include "afc/field.hpp"
#include "afc/solver.hpp"

namespace afc {

/// Gaussian temporal modes, one per slot of width tau = 12 pi / Gamma.
/// Slot k spans [k tau, (k + 1) tau) and mode k sits at its centre with an
/// intensity FWHM of tau / 3.
struct ModeTrain {
  int n_modes = 0;
  double slot = 0.0;            // tau
  double total_duration = 0.0;  // T = N tau
  double rephasing_time = 0.0;  // 2 pi / Delta
  double control_time = 0.0;    // T0
  std::vector<GaussianPulse> modes;

  PulseTrain as_pulse_train() const { return PulseTrain{modes}; }
  double slot_start(int k) const { return k * slot; }
};

/// Throws ConfigError when N tau > 2 pi / Delta - T0 or N < 1. `amplitudes`
/// is empty (all ones) or holds one complex amplitude per mode.
ModeTrain make_mode_train(int n_modes, double big_gamma, double delta, double control_time,
                          const std::vector<cplx>& amplitudes = {});

struct ModeCapacity {
  int n_modes = 0;       // floor((2 pi / Delta - T0) / (12 pi / Gamma))
  double n_peaks = 0.0;  // Gamma / Delta
  double approx = 0.0;   // N_p / 6
};

ModeCapacity mode_capacity(double big_gamma, double delta, double control_time);

struct CrosstalkReport {
  std::vector<double> per_mode_eta;
  std::vector<double> centroid_in;
  std::vector<double> centroid_out;  // output centroid inside slot k shifted by the echo delay
  // overlap(k, j) = <template_k | output gated to slot j>, row-major N x N,
  // templates normalised to unit energy.
  std::vector<cplx> overlap_matrix;
  double mean_eta = 0.0;
  double uniformity_std = 0.0;
  double max_crosstalk = 0.0;  // max over k != j of |overlap(k,j)|^2 / |overlap(k,k)|^2
  std::vector<std::string> warnings;

  cplx overlap(int k, int j) const {
    return overlap_matrix[static_cast<std::size_t>(k) * per_mode_eta.size() + j];
  }
};

/// Matched-filter efficiencies of an echo train; templates are the input
/// modes delayed by 2 pi / Delta + extra_delay.
CrosstalkReport matched_filter_efficiencies(const FieldEnvelope& output, const ModeTrain& train,
                                            double extra_delay = 0.0);

/// Solver settings for a train: flip at T + T0 / 2, run until the last echo
/// slot has closed, echo window covering every slot.
SimConfig train_config(const ModeTrain& train, SimConfig base);

/// Backward storage of the whole train with train_config applied.
SimResult simulate_train(const CombParams& params, const ModeTrain& train, const SimConfig& cfg);

}  // namespace afc
