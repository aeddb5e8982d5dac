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

#ifndef BAYESINV_SPLINE_HPP
#define BAYESINV_SPLINE_HPP

/** @file
 * Smoothing splines as posterior means of
 *
 *     f(x) = h(x)^T beta + theta(x),  theta ~ GP(0, sigma_theta^2 K),
 *
 * with K the covariance of the (m-1)-fold integrated Wiener process and a
 * vague prior on beta. The beta part is estimated by generalized least
 * squares, which is the exact sigma_beta -> infinity limit.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bayesinv/errors.hpp"
#include "bayesinv/kernels.hpp"

namespace bayesinv::spline {

namespace internal {
inline void require_unit(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(who) + ": argument must lie in [0, 1]");
}
}  // namespace internal

/// int_0^1 (x-u)_+^l (x'-u)_+^l du / (l!)^2, in closed form.
///
/// With v = min(x, x') and p = |x - x'| the integrand is (p + t)^l t^l on
/// [0, v]; expanding (p + t)^l gives sum_k C(l, k) p^(l-k) v^(l+k+1) / (l+k+1).
inline double integrated_wiener_cov(int l, double x, double x_prime) {
  if (l < 0) throw InvalidParameter("integrated_wiener_cov: l must be >= 0");
  internal::require_unit(x, "integrated_wiener_cov");
  internal::require_unit(x_prime, "integrated_wiener_cov");
  const double v = std::min(x, x_prime);
  const double p = std::abs(x - x_prime);
  double binom = 1.0;
  double acc = 0.0;
  for (int k = 0; k <= l; ++k) {
    acc += binom * std::pow(p, l - k) * std::pow(v, l + k + 1) / static_cast<double>(l + k + 1);
    binom = binom * static_cast<double>(l - k) / static_cast<double>(k + 1);
  }
  const double fact = std::tgamma(static_cast<double>(l) + 1.0);
  return acc / (fact * fact);
}

/// |x - x'| v^2 / 2 + v^3 / 3, v = min(x, x'): the cubic smoothing-spline kernel.
inline double spline_kernel(double x, double x_prime) {
  internal::require_unit(x, "spline_kernel");
  internal::require_unit(x_prime, "spline_kernel");
  const double v = std::min(x, x_prime);
  return std::abs(x - x_prime) * v * v / 2.0 + v * v * v / 3.0;
}

/// Kernel of penalty order m in {1, 2, 3}: the (m-1)-fold integrated Wiener covariance.
inline gp::CovarianceKernel spline_covariance_kernel(std::size_t order) {
  if (order < 1 || order > 3)
    throw InvalidParameter("spline: penalty order m must be 1, 2 or 3, got " + std::to_string(order));
  const int l = static_cast<int>(order) - 1;
  if (l == 1) return gp::CovarianceKernel(spline_kernel, gp::tag::SplineCubic{order});
  return gp::CovarianceKernel([l](double x, double xp) { return integrated_wiener_cov(l, x, xp); },
                              gp::tag::SplineCubic{order});
}

class SplineFit {
 public:
  SplineFit(Eigen::VectorXd x, Eigen::VectorXd y, double sigma2, double sigma2_theta, std::size_t order,
            Eigen::VectorXd beta, Eigen::MatrixXd khat, Eigen::VectorXd weights, Eigen::LLT<Eigen::MatrixXd> factor)
      : x_(std::move(x)),
        y_(std::move(y)),
        sigma2_(sigma2),
        sigma2_theta_(sigma2_theta),
        order_(order),
        beta_(std::move(beta)),
        khat_(std::move(khat)),
        weights_(std::move(weights)),
        factor_(std::move(factor)) {}

  const Eigen::VectorXd& x_train() const noexcept { return x_; }
  const Eigen::VectorXd& y_train() const noexcept { return y_; }
  double sigma2() const noexcept { return sigma2_; }
  double sigma2_theta() const noexcept { return sigma2_theta_; }
  double tau() const noexcept { return sigma2_ / sigma2_theta_; }
  std::size_t m_order() const noexcept { return order_; }
  /// GLS estimate (beta_0, ..., beta_{m-1}) of the polynomial part; empty
  /// when the polynomial part is disabled.
  const Eigen::VectorXd& beta_hat() const noexcept { return beta_; }
  /// sigma_theta^2 K(x_i, x_j) + sigma^2 delta_ij.
  const Eigen::MatrixXd& khat() const noexcept { return khat_; }
  /// Khat^{-1} (y - H^T beta_hat).
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const noexcept { return factor_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  double sigma2_;
  double sigma2_theta_;
  std::size_t order_;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd khat_;
  Eigen::VectorXd weights_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// h(x) = (1, x, ..., x^{m-1}).
inline Eigen::VectorXd polynomial_basis(double x, std::size_t order) {
  Eigen::VectorXd h(static_cast<Eigen::Index>(order));
  double p = 1.0;
  for (Eigen::Index k = 0; k < h.size(); ++k) {
    h(k) = p;
    p *= x;
  }
  return h;
}

struct SplineOptions {
  std::size_t order = 2;         ///< penalty order m; 2 is the cubic spline
  bool vague_polynomial = true;  ///< false drops h(x)^T beta, leaving plain GP regression
};

inline SplineFit spline_fit(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                            double sigma2, double sigma2_theta, SplineOptions options = {}) {
  const std::size_t order = options.order;
  detail::require_param(sigma2 > 0.0 && std::isfinite(sigma2), "spline_fit: sigma2 must be positive");
  detail::require_param(sigma2_theta > 0.0 && std::isfinite(sigma2_theta), "spline_fit: sigma2_theta must be positive");
  detail::require_shape(x.size() == y.size(), "spline_fit: x and y lengths differ");
  const gp::CovarianceKernel kernel = spline_covariance_kernel(order);
  const auto n = x.size();
  const auto p = options.vague_polynomial ? static_cast<Eigen::Index>(order) : Eigen::Index{0};
  if (n < std::max<Eigen::Index>(p, 1)) throw InvalidParameter("spline_fit: need at least m = " + std::to_string(order) + " points");
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool ordered = i == 0 ? x(0) > 0.0 : x(i) > x(i - 1);
    if (!ordered || !(x(i) < 1.0))
      throw InvalidParameter("spline_fit: inputs must satisfy 0 < x_1 < ... < x_n < 1");
  }

  Eigen::MatrixXd khat(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) khat(i, j) = sigma2_theta * kernel(x(i), x(j));
  khat.diagonal().array() += sigma2;
  Eigen::LLT<Eigen::MatrixXd> llt(khat);
  if (llt.info() != Eigen::Success) throw NumericalFailure("spline_fit: Khat is not positive definite");

  if (p == 0) {
    Eigen::VectorXd weights = llt.solve(y);
    return SplineFit(x, y, sigma2, sigma2_theta, order, Eigen::VectorXd(0), std::move(khat), std::move(weights),
                     std::move(llt));
  }
  Eigen::MatrixXd ht(n, p);  // H^T
  for (Eigen::Index i = 0; i < n; ++i) ht.row(i) = polynomial_basis(x(i), order).transpose();
  const Eigen::MatrixXd kinv_ht = llt.solve(ht);
  const Eigen::MatrixXd normal = ht.transpose() * kinv_ht;
  Eigen::LLT<Eigen::MatrixXd> normal_llt(normal);
  if (normal_llt.info() != Eigen::Success) throw NumericalFailure("spline_fit: H Khat^{-1} H^T is singular");
  Eigen::VectorXd beta = normal_llt.solve(kinv_ht.transpose() * y);
  Eigen::VectorXd weights = llt.solve(y - ht * beta);
  return SplineFit(x, y, sigma2, sigma2_theta, order, std::move(beta), std::move(khat), std::move(weights),
                   std::move(llt));
}

/// h(x*)^T beta_hat + s(x*)^T Khat^{-1} (y - H^T beta_hat).
inline double spline_predict(const SplineFit& fit, double x_star) {
  internal::require_unit(x_star, "spline_predict");
  const gp::CovarianceKernel kernel = spline_covariance_kernel(fit.m_order());
  double acc = 0.0;
  if (fit.beta_hat().size() > 0) acc = polynomial_basis(x_star, fit.m_order()).dot(fit.beta_hat());
  for (Eigen::Index i = 0; i < fit.x_train().size(); ++i)
    acc += fit.sigma2_theta() * kernel(x_star, fit.x_train()(i)) * fit.weights()(i);
  return acc;
}

}  // namespace bayesinv::spline

#endif  // BAYESINV_SPLINE_HPP
