#pragma once

#include <span>
#include <vector>

#include "afc/comb.hpp"
#include "afc/field.hpp"

namespace afc {

enum class Direction { forward, backward };

/// Which implementation advances the coupled field/coherence system.
enum class KernelKind {
  parallel,   // fused single pass per step, OpenMP over spatial rows
  reference,  // serial, unfused, coefficients by numerical quadrature
};

/// Time stepper for the retardation-free linearised Maxwell-Bloch system
///
///   d sigma_i / dt = -i delta_i sigma_i + i E
///   dE / dz        = +-i kappa sum_i w_i sigma_i      (+ forward, - backward)
///
/// on a uniform grid of `nz` points over [0, L]. Each coherence is rotated
/// exactly by its detuning and driven by a field that is linear in time over
/// the step; the spatial equation uses the trapezoidal rule. Both are
/// implicit in the new field, which is solved row by row from the entry face.
/// The per-row source reductions run in a fixed order, so results do not
/// depend on the thread count.
class Propagator {
 public:
  Propagator(const DiscretizedComb& comb, int nz, double dt, Direction direction,
             KernelKind kind = KernelKind::parallel);

  /// Replace the state with the given coherences (row-major, nz x bins) and field.
  void load(std::span<const cplx> coherences, std::span<const cplx> field);

  /// Advance by dt; `boundary` is the field entering the medium at the new time.
  void step(cplx boundary);

  std::span<const cplx> field() const { return field_; }
  /// Field at the exit face (z = L forward, z = 0 backward).
  cplx exit_field() const;
  /// Current coherences, row-major nz x bins.
  std::vector<cplx> coherences() const;

  int nz() const { return nz_; }
  std::size_t bins() const { return bins_; }
  double dz() const { return dz_; }
  Direction direction() const { return direction_; }

 private:
  void solve_field(cplx boundary);
  void step_parallel(cplx boundary);
  void step_reference(cplx boundary);

  int nz_;
  std::size_t bins_;
  double dz_;
  double dt_;
  double kappa_;
  Direction direction_;
  KernelKind kind_;

  std::vector<double> weights_;
  std::vector<cplx> rotation_;  // exp(-i delta dt)
  std::vector<cplx> drive_new_; // coefficient of E(t + dt) in the coherence update
  std::vector<cplx> drive_old_; // coefficient of E(t)
  std::vector<cplx> fused_;     // rotation * drive_new + drive_old
  cplx drive_sum_;              // sum_i w_i drive_new_i

  // parallel kernel: pre-coupling state q = rotation * sigma + drive_old * E
  // reference kernel: sigma itself
  std::vector<cplx> state_;
  std::vector<cplx> source_;  // per-row sum_i w_i q_i (parallel only)
  std::vector<cplx> field_;
};

/// Coefficients of the exponential integrator for one bin: the new coherence
/// is rotation*sigma + i*(c_old E(t) + c_new E(t+dt)).
struct DriveCoefficients {
  cplx rotation;
  cplx c_old;
  cplx c_new;
};
DriveCoefficients drive_coefficients(double detuning, double dt);

}  // namespace afc
