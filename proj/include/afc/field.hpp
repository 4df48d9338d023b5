#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace afc {

using cplx = std::complex<double>;

/// Complex slowly-varying amplitude on a uniform time grid at one position.
struct FieldEnvelope {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<cplx> samples;

  FieldEnvelope() = default;
  FieldEnvelope(double t0_, double dt_, std::size_t n) : t0(t0_), dt(dt_), samples(n) {}

  std::size_t size() const { return samples.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return samples.empty() ? t0 : time(samples.size() - 1); }

  /// Sum |E_k|^2 dt.
  double energy() const;
  /// Energy restricted to samples with t in [t_lo, t_hi].
  double energy_between(double t_lo, double t_hi) const;
  /// Intensity-weighted mean time over [t_lo, t_hi]; NaN if the window is empty.
  double centroid(double t_lo, double t_hi) const;
  double centroid() const;
  /// Intensity FWHM of a Gaussian with the same RMS duration.
  double rms_fwhm() const;
  /// Catmull-Rom interpolation; zero outside the grid.
  cplx at(double t) const;
  double max_abs() const;
};

/// Gaussian amplitude  a * exp(-2 ln 2 (t - centre)^2 / fwhm^2); `fwhm` refers to |E|^2.
struct GaussianPulse {
  double centre = 0.0;
  double fwhm = 0.0;
  cplx amplitude = 1.0;

  cplx operator()(double t) const;
  /// Angular-frequency FWHM of the intensity spectrum, 4 ln 2 / fwhm.
  double spectral_fwhm() const;
  double energy() const;
};

/// Pulse whose temporal intensity FWHM gives the requested spectral FWHM (rad/s).
GaussianPulse pulse_from_bandwidth(double spectral_fwhm, double centre, cplx amplitude = 1.0);

/// A superposition of Gaussian pulses that can be sampled on any grid.
struct PulseTrain {
  std::vector<GaussianPulse> pulses;

  cplx operator()(double t) const;
  FieldEnvelope sample(double t0, double dt, std::size_t n) const;
  double shortest_fwhm() const;
};

/// Inner product  sum conj(a_k) b_k dt  over the overlapping part of two
/// envelopes sharing the same dt (grids may be offset by whole steps).
cplx overlap(const FieldEnvelope& a, const FieldEnvelope& b);

/// Copy of `f` with its time axis moved by `shift`.
FieldEnvelope shifted(const FieldEnvelope& f, double shift);

}  // namespace afc
