#pragma once

#include <complex>
#include <vector>

namespace afc {

enum class Envelope {
  gaussian,  // exp(-(delta - delta0)^2 / (2 Gamma^2)) weighting of every line
  square,    // lines with |j Delta| <= Gamma / 2 kept at full height, others dropped
};

/// Spectral density parameters of an atomic frequency comb. All frequencies
/// are angular (rad/s).
struct CombParams {
  double delta = 0.0;        // peak separation
  double gamma_tilde = 0.0;  // Gaussian standard deviation of a single line
  double big_gamma = 0.0;    // envelope width (std-dev for gaussian, full width for square); may be +inf
  double delta0 = 0.0;       // comb centre offset from the carrier
  double peak_depth = 0.0;   // optical depth d = alpha L at a line centre
  Envelope envelope = Envelope::gaussian;

  /// Builds parameters from a finesse instead of a line width.
  static CombParams from_finesse(double delta, double finesse, double big_gamma, double peak_depth,
                                 double delta0 = 0.0, Envelope envelope = Envelope::gaussian);

  /// Line FWHM gamma = sqrt(8 ln 2) * gamma_tilde.
  double fwhm() const;

  /// Throws ConfigError unless all invariants hold (positive widths, F > 1).
  void validate() const;

  /// True inside the working regime Gamma >= 10 Delta and Delta >= 10 gamma_tilde.
  bool well_separated() const;
};

double finesse_of(const CombParams& params);

/// Effective optical depth of a comb averaged over many lines:
/// (d / F) * sqrt(pi / (4 ln 2)).
double effective_depth(double peak_depth, double finesse);

/// Envelope factor in [0, 1] at absolute detuning.
double envelope_weight(double detuning, const CombParams& params);

/// Comb spectral density n(delta), normalised so a single isolated line peaks at 1.
double comb_density(double detuning, const CombParams& params);

enum class FtMethod { analytic, quadrature };

/// Fourier transform  n~(t) = integral n(delta) exp(-i delta t) d delta.
/// The quadrature route throws NumericalError if its error estimate exceeds
/// 1e-8 of |n~(0)|.
std::complex<double> comb_ft(double t, const CombParams& params, FtMethod method);

/// Detuning bins and quadrature weights representing n(delta) for the solver.
struct DiscretizedComb {
  std::vector<double> detunings;  // rad/s, strictly increasing
  std::vector<double> weights;    // n(delta_i) * d delta_i, in the units of comb_density * rad/s
  double coupling = 0.0;          // light-atom coupling kappa, set by calibrate_coupling
  double length = 1.0;            // medium length; only kappa * length matters
  int n_peaks = 0;
  int nodes_per_peak = 0;
  double line_centre = 0.0;   // detuning of the central line
  double line_sigma = 0.0;    // gamma_tilde
  double line_density = 0.0;  // density at the central line centre implied by its weights

  std::size_t size() const { return detunings.size(); }
  double total_weight() const;
};

/// Per-line Gauss-Hermite discretisation. Lines whose envelope weight falls
/// below `peak_cutoff` of the maximum are dropped. Throws ConfigError for
/// nodes_per_peak < 7, a cutoff outside (0, 1], an unbounded envelope, or
/// fewer than three retained lines. `coupling` is left at zero.
DiscretizedComb discretize_comb(const CombParams& params, double length, int nodes_per_peak,
                                double peak_cutoff);

}  // namespace afc
