#include "afc/field.hpp"

#include "afc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace afc {

double FieldEnvelope::energy() const {
  double e = 0.0;
  for (const cplx& s : samples) e += std::norm(s);
  return e * dt;
}

double FieldEnvelope::energy_between(double t_lo, double t_hi) const {
  double e = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double t = time(k);
    if (t >= t_lo && t <= t_hi) e += std::norm(samples[k]);
  }
  return e * dt;
}

double FieldEnvelope::centroid(double t_lo, double t_hi) const {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double t = time(k);
    if (t < t_lo || t > t_hi) continue;
    double w = std::norm(samples[k]);
    num += w * t;
    den += w;
  }
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

double FieldEnvelope::centroid() const {
  return centroid(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

double FieldEnvelope::rms_fwhm() const {
  const double c = centroid();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double w = std::norm(samples[k]);
    double u = time(k) - c;
    num += w * u * u;
    den += w;
  }
  if (!(den > 0.0)) return 0.0;
  // |E|^2 = exp(-t^2 / (2 s^2)) has FWHM 2 sqrt(2 ln 2) s.
  return 2.0 * std::sqrt(2.0 * std::numbers::ln2 * num / den);
}

cplx FieldEnvelope::at(double t) const {
  if (samples.empty()) return 0.0;
  const double x = (t - t0) / dt;
  const long n = static_cast<long>(samples.size());
  long k = static_cast<long>(std::floor(x));
  double f = x - static_cast<double>(k);
  if (f > 1.0 - 1e-9) {  // snap to the next node when within round-off
    ++k;
    f = 0.0;
  }
  auto s = [&](long i) -> cplx { return (i >= 0 && i < n) ? samples[i] : cplx(0.0); };
  if (k < -1 || k > n - 1) return 0.0;
  if (f < 1e-9) return s(k);
  const cplx p0 = s(k - 1), p1 = s(k), p2 = s(k + 1), p3 = s(k + 2);
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * f + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (f * f) +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * (f * f * f));
}

double FieldEnvelope::max_abs() const {
  double m = 0.0;
  for (const cplx& s : samples) m = std::max(m, std::abs(s));
  return m;
}

cplx GaussianPulse::operator()(double t) const {
  double x = (t - centre) / fwhm;
  return amplitude * std::exp(-2.0 * std::numbers::ln2 * x * x);
}

double GaussianPulse::spectral_fwhm() const { return 4.0 * std::numbers::ln2 / fwhm; }

double GaussianPulse::energy() const {
  // integral exp(-4 ln2 t^2 / fwhm^2) dt
  return std::norm(amplitude) * fwhm * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
}

GaussianPulse pulse_from_bandwidth(double spectral_fwhm, double centre, cplx amplitude) {
  if (!(spectral_fwhm > 0.0)) throw ConfigError("pulse bandwidth must be > 0");
  return GaussianPulse{centre, 4.0 * std::numbers::ln2 / spectral_fwhm, amplitude};
}

cplx PulseTrain::operator()(double t) const {
  cplx acc = 0.0;
  for (const auto& p : pulses) acc += p(t);
  return acc;
}

FieldEnvelope PulseTrain::sample(double t0, double dt, std::size_t n) const {
  FieldEnvelope f(t0, dt, n);
  for (std::size_t k = 0; k < n; ++k) f.samples[k] = (*this)(f.time(k));
  return f;
}

double PulseTrain::shortest_fwhm() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pulses) m = std::min(m, p.fwhm);
  return m;
}

cplx overlap(const FieldEnvelope& a, const FieldEnvelope& b) {
  if (a.dt != b.dt) throw ConfigError("overlap needs envelopes with equal time steps");
  double offset = (b.t0 - a.t0) / a.dt;
  long shift = std::lround(offset);
  if (std::abs(offset - static_cast<double>(shift)) > 1e-6) {
    throw ConfigError("overlap needs time grids aligned to whole steps");
  }
  // a index k pairs with b index k - shift.
  cplx acc = 0.0;
  for (long k = 0; k < static_cast<long>(a.size()); ++k) {
    long kb = k - shift;
    if (kb < 0 || kb >= static_cast<long>(b.size())) continue;
    acc += std::conj(a.samples[k]) * b.samples[kb];
  }
  return acc * a.dt;
}

FieldEnvelope shifted(const FieldEnvelope& f, double shift) {
  FieldEnvelope out = f;
  out.t0 += shift;
  return out;
}

}  // namespace afc
