#pragma once

#include <vector>

namespace afc {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for  integral exp(-x^2) f(x) dx  (Golub-Welsch).
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

}  // namespace afc
