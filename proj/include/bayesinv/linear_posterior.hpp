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

#ifndef BAYESINV_LINEAR_POSTERIOR_HPP
#define BAYESINV_LINEAR_POSTERIOR_HPP

/** @file
 * Gaussian posterior of y = K theta + eps, eps ~ N(0, sigma^2 I), under a
 * finite-difference prior with precision root A and scale tilde_sigma.
 *
 * The negative log posterior is the Tikhonov functional
 *
 *     T(theta) = |y - K theta|^2 / (2 sigma^2) + |A theta|^2 / (2 tilde_sigma^2),
 *
 * whose Hessian H = K^T K / sigma^2 + A^T A / tilde_sigma^2 is the posterior
 * precision. The MAP estimate (the Tikhonov minimizer) solves
 * H theta = K^T y / sigma^2.
 */

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bayesinv/errors.hpp"
#include "bayesinv/fd_priors.hpp"
#include "bayesinv/forward_ops.hpp"
#include "bayesinv/random.hpp"

namespace bayesinv::posterior {

class GaussianPosterior {
 public:
  GaussianPosterior(forward::ForwardOperator op, priors::PrecisionRoot prior, double sigma,
                    Eigen::MatrixXd hessian, Eigen::LLT<Eigen::MatrixXd> factor, Eigen::VectorXd mean)
      : op_(std::move(op)),
        prior_(std::move(prior)),
        sigma_(sigma),
        hessian_(std::move(hessian)),
        factor_(std::move(factor)),
        mean_(std::move(mean)) {}

  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
  /// MAP estimate, which is also the posterior mean.
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  double sigma() const noexcept { return sigma_; }
  double tilde_sigma() const noexcept { return prior_.tilde_sigma(); }
  const forward::ForwardOperator& op() const noexcept { return op_; }
  const priors::PrecisionRoot& prior() const noexcept { return prior_; }
  /// Cholesky factor of the Hessian, H = L L^T.
  const Eigen::LLT<Eigen::MatrixXd>& factor() const noexcept { return factor_; }

 private:
  forward::ForwardOperator op_;
  priors::PrecisionRoot prior_;
  double sigma_;
  Eigen::MatrixXd hessian_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd mean_;
};

inline GaussianPosterior fit(const forward::ForwardOperator& op, const priors::PrecisionRoot& prior,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double sigma) {
  detail::require_param(sigma > 0.0 && std::isfinite(sigma), "posterior::fit: sigma must be positive");
  detail::require_shape(y.size() == op.rows(), "posterior::fit: data length " + std::to_string(y.size()) +
                                                   " does not match operator rows " +
                                                   std::to_string(op.rows()));
  detail::require_shape(prior.dimension() == op.cols(),
                        "posterior::fit: prior dimension does not match operator columns");

  const double ts = prior.tilde_sigma();
  const Eigen::MatrixXd& k = op.matrix();
  Eigen::MatrixXd h = k.transpose() * k / (sigma * sigma);
  h.noalias() += prior.matrix().transpose() * prior.matrix() / (ts * ts);
  h = 0.5 * (h + h.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(h);
  const double tiny = static_cast<double>(h.rows()) * std::numeric_limits<double>::epsilon();
  if (llt.info() != Eigen::Success || !(llt.rcond() > tiny)) {
    throw SingularSystem(
        "posterior::fit: Hessian K^T K / sigma^2 + A^T A / tilde_sigma^2 is singular; the forward "
        "operator does not determine the null space of the " +
        priors::variant_name(prior.variant()) + " prior");
  }
  Eigen::VectorXd rhs = k.transpose() * y / (sigma * sigma);
  Eigen::VectorXd mean = llt.solve(rhs);
  return GaussianPosterior(op, prior, sigma, std::move(h), std::move(llt), std::move(mean));
}

inline double tikhonov_objective(const GaussianPosterior& post, const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  detail::require_shape(theta.size() == post.op().cols(), "tikhonov_objective: theta dimension mismatch");
  detail::require_shape(y.size() == post.op().rows(), "tikhonov_objective: data dimension mismatch");
  const double s = post.sigma();
  const double ts = post.tilde_sigma();
  const double misfit = (y - post.op().matrix() * theta).squaredNorm() / (2.0 * s * s);
  const double penalty = (post.prior().matrix() * theta).squaredNorm() / (2.0 * ts * ts);
  return misfit + penalty;
}

/// H^{-1}. The only place the library forms an explicit inverse.
inline Eigen::MatrixXd posterior_covariance(const GaussianPosterior& post) {
  const auto n = post.hessian().rows();
  Eigen::MatrixXd cov = post.factor().solve(Eigen::MatrixXd::Identity(n, n));
  return 0.5 * (cov + cov.transpose());
}

inline Eigen::VectorXd posterior_sd(const GaussianPosterior& post) {
  return posterior_covariance(post).diagonal().cwiseSqrt();
}

/// k draws (one per row): mean + L^{-T} z, since (L^{-T})(L^{-T})^T = H^{-1}.
inline Eigen::MatrixXd sample(const GaussianPosterior& post, Eigen::Index k, std::uint64_t seed) {
  if (k < 1) throw InvalidParameter("posterior::sample: need k >= 1 draws");
  const auto n = post.mean().size();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = normal(rng);
  post.factor().matrixU().solveInPlace(z);
  z.colwise() += post.mean();
  if (!z.allFinite()) throw NumericalFailure("posterior::sample: non-finite draw");
  return z.transpose();
}

enum class PenaltyOrder { Gradient, Laplacian };

/// Riemann-sum approximation of |Delta theta|^2_{L2(0,1)} (Laplacian order) or
/// |grad theta|^2_{L2(0,1)} (gradient order) from the prior's stencil rows.
///
/// Only rows that are genuine stencils enter: every row of the interior
/// variant, rows 1..n-2 of the square smooth variants and rows 1..n-1 of the
/// first-difference variants. With h = 1/n, a (-1, 2, -1)/2 row equals
/// -theta'' h^2 / 2 and a (-1, 1)/2 row equals theta' h / 2, hence the scale
/// factors 4 n^3 and 4 n after weighting each row by h.
inline double discretized_penalty_norm(const priors::PrecisionRoot& prior,
                                       const Eigen::Ref<const Eigen::VectorXd>& theta, PenaltyOrder order) {
  using priors::Variant;
  detail::require_shape(theta.size() == prior.dimension(), "discretized_penalty_norm: dimension mismatch");
  const Variant v = prior.variant();
  const double n = static_cast<double>(prior.dimension());
  const Eigen::VectorXd rows = prior.matrix() * theta;
  if (order == PenaltyOrder::Laplacian) {
    if (!priors::is_smooth(v))
      throw UsageError("discretized_penalty_norm: Laplacian order needs a smooth prior, got " +
                       priors::variant_name(v));
    const Eigen::Index first = v == Variant::SmoothInterior ? 0 : 1;
    const Eigen::Index count = v == Variant::SmoothInterior ? rows.size() : rows.size() - 2;
    return 4.0 * n * n * n * rows.segment(first, count).squaredNorm();
  }
  if (priors::is_smooth(v))
    throw UsageError("discretized_penalty_norm: gradient order needs a first-difference prior, got " +
                     priors::variant_name(v));
  return 4.0 * n * rows.tail(rows.size() - 1).squaredNorm();
}

}  // namespace bayesinv::posterior

#endif  // BAYESINV_LINEAR_POSTERIOR_HPP
