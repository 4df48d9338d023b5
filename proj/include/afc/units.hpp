#pragma once

#include <cmath>
#include <numbers>

namespace afc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// sqrt(8 ln 2): ratio between a Gaussian FWHM and its standard deviation.
inline const double kFwhmPerSigma = std::sqrt(8.0 * std::numbers::ln2);

inline constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
inline constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Wrap an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

}  // namespace afc
