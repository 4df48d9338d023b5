#include "afc/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace afc {

namespace {

// Eigen-decomposition of the symmetric Jacobi matrix with zero diagonal and
// off-diagonal beta_k; mu0 is the integral of the weight function.
QuadratureRule golub_welsch(int n, double mu0, auto beta) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = beta(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton polish on the orthonormal recurrence, then Christoffel weights
  // 1 / sum p_k(x)^2, which keep their relative accuracy in the tails.
  for (int k = 0; k < n; ++k) {
    double x = eig.eigenvalues()(k);
    double norm = 0.0;
    for (int it = 0; it < 3; ++it) {
      double p_prev = 0.0, p = 1.0 / std::sqrt(mu0), dp_prev = 0.0, dp = 0.0;
      norm = p * p;
      for (int j = 0; j < n; ++j) {
        double b_next = beta(j + 1);
        double b = j > 0 ? beta(j) : 0.0;
        double p_next = (x * p - b * p_prev) / b_next;
        double dp_next = (p + x * dp - b * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if (j + 1 < n) norm += p * p;
      }
      if (dp != 0.0) x -= p / dp;
    }
    rule.nodes[k] = x;
    rule.weights[k] = 1.0 / norm;
  }
  // Symmetrise to remove eigen-solver round-off; both weight functions are even.
  for (int k = 0; k < n / 2; ++k) {
    int m = n - 1 - k;
    double x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
    double w = 0.5 * (rule.weights[m] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[m] = x;
    rule.weights[k] = rule.weights[m] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  return golub_welsch(n, std::sqrt(std::numbers::pi), [](int k) { return std::sqrt(0.5 * k); });
}

QuadratureRule gauss_legendre(int n) {
  return golub_welsch(n, 2.0, [](int k) {
    double kk = static_cast<double>(k);
    return kk / std::sqrt(4.0 * kk * kk - 1.0);
  });
}

}  // namespace afc
