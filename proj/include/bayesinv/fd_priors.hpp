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

#ifndef BAYESINV_FD_PRIORS_HPP
#define BAYESINV_FD_PRIORS_HPP

/** @file
 * Finite-difference Gaussian priors pi(theta) ~ exp(-|A theta|^2 / (2 s^2)).
 *
 * A is the "precision root": its Gram matrix A^T A is the prior precision up to
 * the scale s. Smooth priors use second differences, non-smooth priors first
 * differences, optionally reweighted row by row to allow jumps. All stencils
 * keep the 1/2 prefactor used throughout this family of priors.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bayesinv/errors.hpp"

namespace bayesinv::priors {

enum class Variant {
  SmoothInterior,      ///< (n-2) x n second differences, affine null space.
  SmoothZeroBoundary,  ///< n x n, theta = 0 outside the grid.
  SmoothSoftBoundary,  ///< n x n, boundary values with variance s^2 / delta^2.
  NonSmooth,           ///< n x n lower-bidiagonal first differences.
  SingleJump,          ///< NonSmooth with one reweighted increment.
  MultiJump,           ///< NonSmooth with several reweighted increments.
};

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::SmoothInterior: return "smooth_interior";
    case Variant::SmoothZeroBoundary: return "smooth_zero_boundary";
    case Variant::SmoothSoftBoundary: return "smooth_soft_boundary";
    case Variant::NonSmooth: return "nonsmooth";
    case Variant::SingleJump: return "single_jump";
    case Variant::MultiJump: return "multi_jump";
  }
  return "unknown";
}

inline bool is_smooth(Variant v) noexcept {
  return v == Variant::SmoothInterior || v == Variant::SmoothZeroBoundary ||
         v == Variant::SmoothSoftBoundary;
}

/// One reweighted row of the first-difference matrix. Row \c index (0-based)
/// encodes theta[index] - theta[index - 1]; \c weight is the diagonal entry
/// of D taken literally, so single-jump callers pass xi^2.
struct Jump {
  std::size_t index;
  double weight;
};

class PrecisionRoot {
 public:
  PrecisionRoot(Eigen::MatrixXd matrix, Variant variant, double tilde_sigma,
                std::optional<double> boundary_delta = std::nullopt, std::vector<Jump> jumps = {})
      : matrix_(std::move(matrix)),
        variant_(variant),
        tilde_sigma_(tilde_sigma),
        boundary_delta_(boundary_delta),
        jumps_(std::move(jumps)) {
    detail::require_param(tilde_sigma_ > 0.0 && std::isfinite(tilde_sigma_),
                          "PrecisionRoot: prior scale must be positive");
  }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Variant variant() const noexcept { return variant_; }
  double tilde_sigma() const noexcept { return tilde_sigma_; }
  std::optional<double> boundary_delta() const noexcept { return boundary_delta_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  Eigen::Index dimension() const noexcept { return matrix_.cols(); }

  /// A^T A, the prior precision times tilde_sigma^2.
  Eigen::MatrixXd gram() const { return matrix_.transpose() * matrix_; }

  PrecisionRoot with_tilde_sigma(double s) const {
    return PrecisionRoot(matrix_, variant_, s, boundary_delta_, jumps_);
  }

 private:
  Eigen::MatrixXd matrix_;
  Variant variant_;
  double tilde_sigma_;
  std::optional<double> boundary_delta_;
  std::vector<Jump> jumps_;
};

namespace internal {

inline void require_size(std::size_t n, std::size_t min, const char* who) {
  if (n < min)
    throw InvalidParameter(std::string(who) + ": need n >= " + std::to_string(min) + ", got " +
                           std::to_string(n));
}

inline Eigen::MatrixXd zero_boundary_matrix(Eigen::Index n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    if (i > 0) m(i, i - 1) = -0.5;
    if (i + 1 < n) m(i, i + 1) = -0.5;
  }
  return m;
}

inline Eigen::MatrixXd first_difference_matrix(Eigen::Index n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(0, 0) = 0.5;
  for (Eigen::Index i = 1; i < n; ++i) {
    m(i, i - 1) = -0.5;
    m(i, i) = 0.5;
  }
  return m;
}

}  // namespace internal

/// Rows (-1, 2, -1) / 2 centred on every interior node.
inline PrecisionRoot build_smooth_interior(std::size_t n, double tilde_sigma = 1.0) {
  internal::require_size(n, 3, "build_smooth_interior");
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nn - 2, nn);
  for (Eigen::Index r = 0; r < nn - 2; ++r) {
    m(r, r) = -0.5;
    m(r, r + 1) = 1.0;
    m(r, r + 2) = -0.5;
  }
  return PrecisionRoot(std::move(m), Variant::SmoothInterior, tilde_sigma);
}

inline PrecisionRoot build_smooth_zero_boundary(std::size_t n, double tilde_sigma = 1.0) {
  internal::require_size(n, 2, "build_smooth_zero_boundary");
  return PrecisionRoot(internal::zero_boundary_matrix(static_cast<Eigen::Index>(n)),
                       Variant::SmoothZeroBoundary, tilde_sigma);
}

/// Boundary rows replaced by delta * e_0 and delta * e_{n-1}, with
/// delta^2 = 1 / [(Lt^T Lt)^{-1}]_{kk}, k = floor(n/2), Lt the zero-boundary root.
/// This matches the boundary variance to the mid-domain variance of the
/// zero-boundary prior, avoiding the fixed-point problem in delta.
inline PrecisionRoot build_smooth_soft_boundary(std::size_t n, double tilde_sigma = 1.0) {
  internal::require_size(n, 3, "build_smooth_soft_boundary");
  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd lt = internal::zero_boundary_matrix(nn);
  Eigen::LLT<Eigen::MatrixXd> llt(lt.transpose() * lt);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("build_smooth_soft_boundary: zero-boundary Gram matrix is singular");
  const Eigen::Index k = nn / 2;
  const Eigen::VectorXd col = llt.solve(Eigen::VectorXd::Unit(nn, k));
  const double delta = std::sqrt(1.0 / col(k));

  Eigen::MatrixXd m = lt;
  m.row(0).setZero();
  m.row(nn - 1).setZero();
  m(0, 0) = delta;
  m(nn - 1, nn - 1) = delta;
  return PrecisionRoot(std::move(m), Variant::SmoothSoftBoundary, tilde_sigma, delta);
}

/// First row (1, 0, ...) / 2, then (-1, 1) / 2 increments.
inline PrecisionRoot build_nonsmooth(std::size_t n, double tilde_sigma = 1.0) {
  internal::require_size(n, 2, "build_nonsmooth");
  return PrecisionRoot(internal::first_difference_matrix(static_cast<Eigen::Index>(n)),
                       Variant::NonSmooth, tilde_sigma);
}

/// D * L* with D diagonal: \c jump.weight at each jump row, 1 elsewhere.
inline PrecisionRoot build_jump(std::size_t n, std::span<const Jump> jumps, double tilde_sigma = 1.0) {
  internal::require_size(n, 2, "build_jump");
  std::vector<Jump> sorted(jumps.begin(), jumps.end());
  std::sort(sorted.begin(), sorted.end(), [](const Jump& a, const Jump& b) { return a.index < b.index; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k].index >= n)
      throw InvalidParameter("build_jump: jump index " + std::to_string(sorted[k].index) +
                             " out of range for n = " + std::to_string(n));
    if (k > 0 && sorted[k].index == sorted[k - 1].index)
      throw InvalidParameter("build_jump: duplicate jump index " + std::to_string(sorted[k].index));
    if (!(sorted[k].weight > 0.0 && sorted[k].weight < 1.0))
      throw InvalidParameter("build_jump: jump weight must lie in (0, 1)");
  }
  Eigen::MatrixXd m = internal::first_difference_matrix(static_cast<Eigen::Index>(n));
  for (const Jump& j : sorted) m.row(static_cast<Eigen::Index>(j.index)) *= j.weight;
  Variant v = sorted.empty() ? Variant::NonSmooth
                             : (sorted.size() == 1 ? Variant::SingleJump : Variant::MultiJump);
  return PrecisionRoot(std::move(m), v, tilde_sigma, std::nullopt, std::move(sorted));
}

/// log pi(theta) up to an additive constant: -|A theta|^2 / (2 tilde_sigma^2).
inline double prior_log_density(const PrecisionRoot& root, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  bayesinv::detail::require_shape(theta.size() == root.dimension(),
                                  "prior_log_density: theta dimension mismatch");
  const double s = root.tilde_sigma();
  return -(root.matrix() * theta).squaredNorm() / (2.0 * s * s);
}

}  // namespace bayesinv::priors

#endif  // BAYESINV_FD_PRIORS_HPP
