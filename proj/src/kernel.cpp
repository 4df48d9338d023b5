#include "afc/kernel.hpp"

#include "afc/error.hpp"
#include "afc/quadrature.hpp"

#include <cmath>

namespace afc {

using namespace std::complex_literals;

namespace {

// phi1(x) = (e^x - 1)/x and psi(x) = (e^x (x - 1) + 1)/x^2.
void phi_functions(cplx x, cplx& phi1, cplx& psi) {
  if (std::abs(x) < 0.1) {
    cplx term = 1.0;
    phi1 = 0.0;
    psi = 0.0;
    double fact = 1.0;  // (k+1)!
    for (int k = 0; k < 10; ++k) {
      fact *= (k + 1);
      phi1 += term / fact;
      psi += term * static_cast<double>(k + 1) / (fact * (k + 2));
      term *= x;
    }
    return;
  }
  cplx ex = std::exp(x);
  phi1 = (ex - 1.0) / x;
  psi = (ex * (x - 1.0) + 1.0) / (x * x);
}

// Same integrals by composite Gauss-Legendre; used by the reference kernel.
DriveCoefficients drive_by_quadrature(double detuning, double dt) {
  static const QuadratureRule gl = gauss_legendre(16);
  const int panels = 1 + static_cast<int>(std::ceil(std::abs(detuning) * dt / 2.0));
  const double h = dt / panels;
  cplx c_old = 0.0, c_new = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double u = (p + 0.5 * (1.0 + gl.nodes[q])) * h;  // time before the end of the step
      cplx kernel = std::exp(-1i * (detuning * u)) * (0.5 * h * gl.weights[q]);
      c_old += kernel * (u / dt);
      c_new += kernel * (1.0 - u / dt);
    }
  }
  return {std::exp(-1i * (detuning * dt)), c_old, c_new};
}

// (a * b) + (c * d) with plain real arithmetic; avoids the NaN recovery path of
// std::complex multiplication in the hot loop.
inline cplx mul_add(cplx a, cplx b, cplx c, cplx d) {
  return {a.real() * b.real() - a.imag() * b.imag() + c.real() * d.real() - c.imag() * d.imag(),
          a.real() * b.imag() + a.imag() * b.real() + c.real() * d.imag() + c.imag() * d.real()};
}

}  // namespace

DriveCoefficients drive_coefficients(double detuning, double dt) {
  cplx x = -1i * (detuning * dt);
  cplx phi1, psi;
  phi_functions(x, phi1, psi);
  return {std::exp(x), dt * psi, dt * (phi1 - psi)};
}

Propagator::Propagator(const DiscretizedComb& comb, int nz, double dt, Direction direction,
                       KernelKind kind)
    : nz_(nz),
      bins_(comb.size()),
      dz_(comb.length / (nz - 1)),
      dt_(dt),
      kappa_(comb.coupling),
      direction_(direction),
      kind_(kind),
      weights_(comb.weights) {
  if (nz < 2) throw ConfigError("spatial grid needs at least 2 points");
  if (!(dt > 0.0)) throw ConfigError("time step must be > 0");
  rotation_.resize(bins_);
  drive_old_.resize(bins_);
  drive_new_.resize(bins_);
  fused_.resize(bins_);
  drive_sum_ = 0.0;
  for (std::size_t i = 0; i < bins_; ++i) {
    DriveCoefficients c = kind == KernelKind::reference ? drive_by_quadrature(comb.detunings[i], dt)
                                                        : drive_coefficients(comb.detunings[i], dt);
    rotation_[i] = c.rotation;
    drive_old_[i] = 1i * c.c_old;
    drive_new_[i] = 1i * c.c_new;
    fused_[i] = rotation_[i] * drive_new_[i] + drive_old_[i];
    drive_sum_ += weights_[i] * drive_new_[i];
  }
  state_.assign(static_cast<std::size_t>(nz_) * bins_, 0.0);
  source_.assign(nz_, 0.0);
  field_.assign(nz_, 0.0);
}

void Propagator::load(std::span<const cplx> coherences, std::span<const cplx> field) {
  if (coherences.size() != state_.size() || field.size() != field_.size()) {
    throw ConfigError("propagator state has the wrong shape");
  }
  std::copy(field.begin(), field.end(), field_.begin());
  if (kind_ == KernelKind::reference) {
    std::copy(coherences.begin(), coherences.end(), state_.begin());
    return;
  }
  const std::size_t nb = bins_;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz_; ++j) {
    const cplx e = field_[j];
    cplx* q = state_.data() + static_cast<std::size_t>(j) * nb;
    const cplx* s = coherences.data() + static_cast<std::size_t>(j) * nb;
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      q[i] = mul_add(rotation_[i], s[i], drive_old_[i], e);
      acc += weights_[i] * q[i];
    }
    source_[j] = acc;
  }
}

cplx Propagator::exit_field() const {
  return direction_ == Direction::forward ? field_.back() : field_.front();
}

std::vector<cplx> Propagator::coherences() const {
  if (kind_ == KernelKind::reference) return state_;
  std::vector<cplx> sigma(state_.size());
  const std::size_t nb = bins_;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz_; ++j) {
    const cplx e = field_[j];
    const cplx* q = state_.data() + static_cast<std::size_t>(j) * nb;
    cplx* s = sigma.data() + static_cast<std::size_t>(j) * nb;
    for (std::size_t i = 0; i < nb; ++i) s[i] = std::conj(rotation_[i]) * (q[i] - drive_old_[i] * e);
  }
  return sigma;
}

void Propagator::step(cplx boundary) {
  if (kind_ == KernelKind::reference) {
    step_reference(boundary);
  } else {
    step_parallel(boundary);
  }
}

// Trapezoidal march through the rows given the per-row sources of the
// pre-coupling coherences: S_j = source_j + drive_sum * E_j.
void Propagator::solve_field(cplx boundary) {
  const cplx g = 1i * (0.5 * kappa_ * dz_);
  const cplx denom = 1.0 - g * drive_sum_;
  if (direction_ == Direction::forward) {
    field_[0] = boundary;
    for (int j = 0; j + 1 < nz_; ++j) {
      field_[j + 1] = (field_[j] + g * (source_[j] + drive_sum_ * field_[j] + source_[j + 1])) / denom;
    }
  } else {
    field_[nz_ - 1] = boundary;
    for (int j = nz_ - 1; j > 0; --j) {
      field_[j - 1] = (field_[j] + g * (source_[j] + drive_sum_ * field_[j] + source_[j - 1])) / denom;
    }
  }
}

void Propagator::step_parallel(cplx boundary) {
  solve_field(boundary);
  const std::size_t nb = bins_;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nz_; ++j) {
    const cplx e = field_[j];
    cplx* q = state_.data() + static_cast<std::size_t>(j) * nb;
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      cplx v = mul_add(rotation_[i], q[i], fused_[i], e);
      q[i] = v;
      acc_re += weights_[i] * v.real();
      acc_im += weights_[i] * v.imag();
    }
    source_[j] = {acc_re, acc_im};
  }
}

void Propagator::step_reference(cplx boundary) {
  const std::size_t nb = bins_;
  std::vector<cplx> pre(state_.size());
  for (int j = 0; j < nz_; ++j) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * nb + i;
      pre[k] = rotation_[i] * state_[k] + drive_old_[i] * field_[j];
      acc += weights_[i] * pre[k];
    }
    source_[j] = acc;
  }
  solve_field(boundary);
  for (int j = 0; j < nz_; ++j) {
    for (std::size_t i = 0; i < nb; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * nb + i;
      state_[k] = pre[k] + drive_new_[i] * field_[j];
    }
  }
}

}  // namespace afc
