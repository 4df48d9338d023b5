#include "afc/comb.hpp"

#include "afc/error.hpp"
#include "afc/quadrature.hpp"
#include "afc/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace afc {

namespace {

// A Gaussian term exp(-x^2/2) drops below 1e-16 of its maximum beyond this many sigmas.
const double kTermCutoffSigmas = std::sqrt(2.0 * std::log(1e16));

bool unbounded(const CombParams& p) { return std::isinf(p.big_gamma); }

// Largest |j| of a line kept by the square envelope.
long square_half_count(const CombParams& p) {
  return static_cast<long>(std::floor(0.5 * p.big_gamma / p.delta * (1.0 + 1e-12)));
}

}  // namespace

CombParams CombParams::from_finesse(double delta, double finesse, double big_gamma,
                                    double peak_depth, double delta0, Envelope envelope) {
  CombParams p;
  p.delta = delta;
  p.gamma_tilde = delta / (finesse * kFwhmPerSigma);
  p.big_gamma = big_gamma;
  p.delta0 = delta0;
  p.peak_depth = peak_depth;
  p.envelope = envelope;
  return p;
}

double CombParams::fwhm() const { return kFwhmPerSigma * gamma_tilde; }

void CombParams::validate() const {
  std::ostringstream err;
  if (!(delta > 0.0) || !std::isfinite(delta)) err << "peak separation must be > 0; ";
  if (!(gamma_tilde > 0.0) || !std::isfinite(gamma_tilde)) err << "line width must be > 0; ";
  if (!(big_gamma > 0.0)) err << "envelope width must be > 0; ";
  if (!(peak_depth >= 0.0) || !std::isfinite(peak_depth)) err << "peak depth must be >= 0; ";
  if (!std::isfinite(delta0)) err << "comb offset must be finite; ";
  if (err.str().empty() && !(finesse_of(*this) > 1.0)) err << "finesse must exceed 1; ";
  if (!err.str().empty()) {
    std::string msg = err.str();
    throw ConfigError("invalid comb parameters: " + msg.substr(0, msg.size() - 2));
  }
}

bool CombParams::well_separated() const {
  return big_gamma >= 10.0 * delta && delta >= 10.0 * gamma_tilde;
}

double finesse_of(const CombParams& params) { return params.delta / params.fwhm(); }

double effective_depth(double peak_depth, double finesse) {
  return peak_depth / finesse * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
}

double envelope_weight(double detuning, const CombParams& params) {
  if (unbounded(params)) return 1.0;
  double x = detuning - params.delta0;
  if (params.envelope == Envelope::square) return std::abs(x) <= 0.5 * params.big_gamma ? 1.0 : 0.0;
  return std::exp(-x * x / (2.0 * params.big_gamma * params.big_gamma));
}

double comb_density(double detuning, const CombParams& params) {
  const double x = (detuning - params.delta0) / params.delta;
  const double reach = kTermCutoffSigmas * params.gamma_tilde / params.delta;
  long j_lo = static_cast<long>(std::floor(x - reach));
  long j_hi = static_cast<long>(std::ceil(x + reach));
  if (params.envelope == Envelope::square && !unbounded(params)) {
    long half = square_half_count(params);
    j_lo = std::max(j_lo, -half);
    j_hi = std::min(j_hi, half);
  }
  double sum = 0.0;
  for (long j = j_lo; j <= j_hi; ++j) {
    double u = (x - static_cast<double>(j)) * params.delta / params.gamma_tilde;
    sum += std::exp(-0.5 * u * u);
  }
  if (params.envelope == Envelope::gaussian) sum *= envelope_weight(detuning, params);
  return sum;
}

namespace {

std::complex<double> ft_analytic(double t, const CombParams& p) {
  using namespace std::complex_literals;
  const double period = kTwoPi / p.delta;
  const std::complex<double> offset_phase = std::exp(-1i * (p.delta0 * t));
  if (p.envelope == Envelope::square) {
    long half = square_half_count(p);
    std::complex<double> lines = 0.0;
    for (long j = -half; j <= half; ++j) lines += std::exp(-1i * (static_cast<double>(j) * p.delta * t));
    double line_ft = std::sqrt(kTwoPi) * p.gamma_tilde *
                     std::exp(-0.5 * p.gamma_tilde * p.gamma_tilde * t * t);
    return offset_phase * line_ft * lines;
  }
  // Poisson-summed transform of envelope x periodic comb: revivals of width
  // 1/Gamma at t_m = m 2pi/Delta, each weighted by the line transform at t_m.
  const double reach = kTermCutoffSigmas / p.big_gamma;
  long m_lo = static_cast<long>(std::floor((t - reach) / period));
  long m_hi = static_cast<long>(std::ceil((t + reach) / period));
  double sum = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    double tm = static_cast<double>(m) * period;
    double a = p.gamma_tilde * tm;
    double b = p.big_gamma * (t - tm);
    sum += std::exp(-0.5 * (a * a + b * b));
  }
  return offset_phase * (kTwoPi * p.gamma_tilde * p.big_gamma / p.delta) * sum;
}

// Integral of one line (times the envelope) against exp(-i delta t), by
// composite Gauss-Legendre over +-9 gamma_tilde with `panels` panels.
std::complex<double> line_integral(long j, double t, const CombParams& p, int panels,
                                   const QuadratureRule& gl) {
  using namespace std::complex_literals;
  const double centre = p.delta0 + static_cast<double>(j) * p.delta;
  const double half_span = 9.0 * p.gamma_tilde;
  const double h = 2.0 * half_span / panels;
  std::complex<double> acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    double mid = centre - half_span + (k + 0.5) * h;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double d = mid + 0.5 * h * gl.nodes[q];
      double u = (d - centre) / p.gamma_tilde;
      double dens = std::exp(-0.5 * u * u);
      if (p.envelope == Envelope::gaussian) dens *= envelope_weight(d, p);
      acc += (0.5 * h * gl.weights[q] * dens) * std::exp(-1i * (d * t));
    }
  }
  return acc;
}

std::complex<double> ft_quadrature(double t, const CombParams& p) {
  static const QuadratureRule gl = gauss_legendre(8);
  long half;
  if (p.envelope == Envelope::square) {
    half = square_half_count(p);
  } else {
    // Integration band covers +-kTermCutoffSigmas Gamma (> 6 Gamma).
    half = static_cast<long>(std::ceil(kTermCutoffSigmas * p.big_gamma / p.delta));
  }
  const int panels = std::max(18, static_cast<int>(std::ceil(18.0 * p.gamma_tilde * std::abs(t))));
  std::complex<double> coarse = 0.0, fine = 0.0;
  for (long j = -half; j <= half; ++j) {
    coarse += line_integral(j, t, p, panels, gl);
    fine += line_integral(j, t, p, 2 * panels, gl);
  }
  const double scale = std::abs(ft_analytic(0.0, p));
  if (std::abs(fine - coarse) > 1e-8 * scale) {
    throw NumericalError("comb", "quadrature of the comb transform did not converge at t=" +
                                     std::to_string(t));
  }
  return fine;
}

}  // namespace

std::complex<double> comb_ft(double t, const CombParams& params, FtMethod method) {
  if (unbounded(params)) throw ConfigError("comb transform needs a finite envelope width");
  return method == FtMethod::analytic ? ft_analytic(t, params) : ft_quadrature(t, params);
}

double DiscretizedComb::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

DiscretizedComb discretize_comb(const CombParams& params, double length, int nodes_per_peak,
                                double peak_cutoff) {
  params.validate();
  if (nodes_per_peak < 7) throw ConfigError("nodes_per_peak must be >= 7");
  if (!(peak_cutoff > 0.0 && peak_cutoff <= 1.0)) throw ConfigError("peak_cutoff must lie in (0, 1]");
  if (unbounded(params)) throw ConfigError("cannot discretise a comb with unbounded envelope");
  if (!(length > 0.0)) throw ConfigError("medium length must be > 0");

  std::vector<long> lines;
  if (params.envelope == Envelope::square) {
    long half = square_half_count(params);
    for (long j = -half; j <= half; ++j) lines.push_back(j);
  } else {
    // envelope exp(-(j Delta)^2 / 2 Gamma^2) >= cutoff
    double jmax = params.big_gamma / params.delta * std::sqrt(-2.0 * std::log(peak_cutoff));
    long half = static_cast<long>(std::floor(jmax));
    for (long j = -half; j <= half; ++j) lines.push_back(j);
  }
  if (lines.size() < 3) {
    throw ConfigError("comb keeps only " + std::to_string(lines.size()) +
                      " lines; at least 3 are required");
  }

  const QuadratureRule gh = gauss_hermite(nodes_per_peak);
  const double scale = std::sqrt(2.0) * params.gamma_tilde;
  std::vector<std::pair<double, double>> bins;
  bins.reserve(lines.size() * gh.nodes.size());
  double central_weight = 0.0;
  for (long j : lines) {
    double centre = params.delta0 + static_cast<double>(j) * params.delta;
    for (std::size_t q = 0; q < gh.nodes.size(); ++q) {
      double d = centre + scale * gh.nodes[q];
      double w = scale * gh.weights[q];
      if (params.envelope == Envelope::gaussian) w *= envelope_weight(d, params);
      if (j == 0) central_weight += w;
      bins.emplace_back(d, w);
    }
  }
  std::sort(bins.begin(), bins.end());

  DiscretizedComb comb;
  comb.length = length;
  comb.n_peaks = static_cast<int>(lines.size());
  comb.nodes_per_peak = nodes_per_peak;
  comb.line_centre = params.delta0;
  comb.line_sigma = params.gamma_tilde;
  comb.line_density = central_weight / (std::sqrt(kTwoPi) * params.gamma_tilde);
  comb.detunings.reserve(bins.size());
  comb.weights.reserve(bins.size());
  for (auto [d, w] : bins) {
    comb.detunings.push_back(d);
    comb.weights.push_back(w);
  }
  return comb;
}

}  // namespace afc
