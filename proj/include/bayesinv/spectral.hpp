/*
 * Copyright 2026 The bayesinv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BAYESINV_SPECTRAL_HPP
#define BAYESINV_SPECTRAL_HPP

/** @file
 * Kernels induced by the differential penalty |P theta|^2 = sum_m b_m |L^m theta|^2
 * in one dimension. Its power spectrum is 1 / sum_m b_m (4 pi^2 s^2)^m and the
 * kernel is the Fourier inverse
 *
 *     K(tau) = int exp(2 pi i s tau) / P(s) ds = 2 int_0^inf cos(2 pi s tau) / P(s) ds.
 */

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <Eigen/Core>

#include "bayesinv/errors.hpp"

namespace bayesinv::spectral {

/// Coefficients b_0..b_M of the penalty, stripped of trailing zeros.
class PenaltyCoefficients {
 public:
  explicit PenaltyCoefficients(std::vector<double> b) : b_(std::move(b)) {
    for (double v : b_)
      detail::require_param(std::isfinite(v) && v >= 0.0, "penalty coefficients must be finite and >= 0");
    while (!b_.empty() && b_.back() == 0.0) b_.pop_back();
    if (b_.empty()) throw InvalidParameter("penalty coefficients are all zero");
    detail::require_param(b_.front() > 0.0, "penalty coefficient b_0 must be positive");
  }

  std::size_t order() const noexcept { return b_.size() - 1; }
  const std::vector<double>& values() const noexcept { return b_; }

  /// sum_m b_m (4 pi^2 s^2)^m.
  double polynomial(double s) const noexcept {
    const double w = 4.0 * std::numbers::pi * std::numbers::pi * s * s;
    double acc = 0.0;
    for (auto it = b_.rbegin(); it != b_.rend(); ++it) acc = acc * w + *it;
    return acc;
  }

  double power_spectrum(double s) const noexcept { return 1.0 / polynomial(s); }

 private:
  std::vector<double> b_;
};

/// Numerical Fourier inversion of the power spectrum. Uses double-exponential
/// quadrature on [0, inf) at tau = 0 and Ooura's Fourier-cosine rule otherwise;
/// the oscillatory tail decays only like s^{-2M}, too slowly for truncation.
class SpectralKernel {
 public:
  explicit SpectralKernel(PenaltyCoefficients b, double rel_tol = 1e-10)
      : b_(std::move(b)), cosine_(rel_tol), rel_tol_(rel_tol) {
    if (b_.order() < 1)
      throw InvalidParameter(
          "spectral kernel: a constant spectrum (M = 0) is not integrable; the penalty needs at "
          "least one derivative term (M >= 1)");
  }

  const PenaltyCoefficients& coefficients() const noexcept { return b_; }

  double operator()(double tau) const {
    const double t = std::abs(tau);
    auto spectrum = [this](double s) { return b_.power_spectrum(s); };
    double value = 0.0;
    if (t == 0.0) {
      boost::math::quadrature::exp_sinh<double> integrator;
      value = 2.0 * integrator.integrate(spectrum, 0.0, std::numeric_limits<double>::infinity(), rel_tol_);
    } else {
      value = 2.0 * cosine_.integrate(spectrum, 2.0 * std::numbers::pi * t).first;
    }
    if (!std::isfinite(value)) throw NumericalFailure("spectral kernel: quadrature did not converge");
    return value;
  }

 private:
  PenaltyCoefficients b_;
  mutable boost::math::quadrature::ooura_fourier_cos<double> cosine_;
  double rel_tol_;
};

/// K(tau) tabulated on \p tau_grid.
inline std::vector<double> spectral_kernel(std::span<const double> b, std::span<const double> tau_grid) {
  const SpectralKernel kernel(PenaltyCoefficients(std::vector<double>(b.begin(), b.end())));
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) out.push_back(kernel(tau));
  return out;
}

/// Central difference stencil for the m-th derivative (unit spacing):
/// (1, -2, 1)^{*m/2} for even m, (-1/2, 0, 1/2) * (1, -2, 1)^{*(m-1)/2} for odd m.
inline std::vector<double> central_stencil(std::size_t m) {
  auto convolve = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  std::vector<double> s = (m % 2 == 1) ? std::vector<double>{-0.5, 0.0, 0.5} : std::vector<double>{1.0};
  for (std::size_t k = 0; k < m / 2; ++k) s = convolve(s, {1.0, -2.0, 1.0});
  return s;
}

/// D_m on an n-point grid of [0, 1): the m-th central difference at every node
/// where the stencil fits, scaled by n^m, times the quadrature weight 1/sqrt(n)
/// so that |D_m theta|^2 approximates |theta^{(m)}|^2_{L2}.
inline Eigen::MatrixXd difference_operator(std::size_t n, std::size_t m) {
  const auto nn = static_cast<Eigen::Index>(n);
  const double scale = std::pow(static_cast<double>(n), static_cast<double>(m)) / std::sqrt(static_cast<double>(n));
  if (m == 0) return Eigen::MatrixXd::Identity(nn, nn) * scale;
  const std::vector<double> stencil = central_stencil(m);
  const auto width = static_cast<Eigen::Index>(stencil.size());
  if (width > nn) throw InvalidParameter("difference_operator: grid too small for derivative order");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nn - width + 1, nn);
  for (Eigen::Index r = 0; r < d.rows(); ++r)
    for (Eigen::Index k = 0; k < width; ++k) d(r, r + k) = stencil[static_cast<std::size_t>(k)] * scale;
  return d;
}

/// theta^T (sum_m b_m D_m^T D_m) theta, the grid approximation of |P theta|^2.
inline double penalty_quadratic_form(std::size_t n, std::span<const double> b,
                                     const Eigen::Ref<const Eigen::VectorXd>& theta) {
  detail::require_param(!b.empty(), "penalty_quadratic_form: empty coefficient vector");
  for (double v : b)
    detail::require_param(std::isfinite(v) && v >= 0.0, "penalty_quadratic_form: coefficients must be >= 0");
  detail::require_shape(theta.size() == static_cast<Eigen::Index>(n), "penalty_quadratic_form: theta length != n");
  const std::size_t order = b.size() - 1;
  if (n < 2 * order + 1)
    throw InvalidParameter("penalty_quadratic_form: need n >= 2M + 1 = " + std::to_string(2 * order + 1) +
                           " grid points, got " + std::to_string(n));
  double total = 0.0;
  for (std::size_t m = 0; m <= order; ++m) {
    if (b[m] == 0.0) continue;
    total += b[m] * (difference_operator(n, m) * theta).squaredNorm();
  }
  return total;
}

}  // namespace bayesinv::spectral

#endif  // BAYESINV_SPECTRAL_HPP
