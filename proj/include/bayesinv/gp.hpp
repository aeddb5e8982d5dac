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

#ifndef BAYESINV_GP_HPP
#define BAYESINV_GP_HPP

/** @file
 * Gram matrices, Nystrom eigen-approximation, truncated RKHS norms and
 * zero-mean Gaussian process regression.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "bayesinv/errors.hpp"
#include "bayesinv/kernels.hpp"
#include "bayesinv/random.hpp"

namespace bayesinv::gp {

inline Eigen::MatrixXd gram(const CovarianceKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& points) {
  const auto n = points.size();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = kernel(points(j), points(j));
    for (Eigen::Index i = j + 1; i < n; ++i) {
      g(i, j) = kernel(points(i), points(j));
      g(j, i) = g(i, j);
    }
  }
  return g;
}

/// How the Nystrom points represent the uniform measure on [0, 1].
enum class Sampling {
  IidUniform,  ///< x_i ~ U(0, 1) independently.
  Midpoint,    ///< x_i = (i - 1/2) / n, the midpoint quadrature of the measure.
};

struct NystromEigenpair {
  double lambda_hat;  ///< lambda_j(Sigma_n) / n, which approximates lambda_j of the kernel.
  Eigen::VectorXd u;  ///< unit eigenvector of Sigma_n, u_i ~ psi_j(x_i) / sqrt(n).
};

struct NystromResult {
  Eigen::VectorXd points;
  std::vector<NystromEigenpair> pairs;
};

inline NystromResult nystrom_eigen(const CovarianceKernel& kernel, std::size_t n, std::size_t count,
                                   std::uint64_t seed, Sampling sampling = Sampling::IidUniform) {
  detail::require_param(n >= 1, "nystrom_eigen: need n >= 1 points");
  detail::require_param(count >= 1 && count <= n, "nystrom_eigen: need 1 <= count <= n");
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd x(nn);
  if (sampling == Sampling::IidUniform) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < nn; ++i) x(i) = unif(rng);
  } else {
    for (Eigen::Index i = 0; i < nn; ++i) x(i) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram(kernel, x));
  if (solver.info() != Eigen::Success) throw NumericalFailure("nystrom_eigen: eigendecomposition failed");

  NystromResult out{x, {}};
  out.pairs.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const Eigen::Index col = nn - 1 - static_cast<Eigen::Index>(j);
    Eigen::VectorXd u = solver.eigenvectors().col(col);
    Eigen::Index big = 0;
    u.cwiseAbs().maxCoeff(&big);
    if (u(big) < 0.0) u = -u;
    out.pairs.push_back({solver.eigenvalues()(col) / static_cast<double>(n), std::move(u)});
  }
  return out;
}

/// <a, b>_H = sum_i a_i b_i / lambda_i over the first N eigenfunctions.
inline double rkhs_inner_truncated(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                                   const Eigen::Ref<const Eigen::VectorXd>& eigenvalues) {
  detail::require_shape(a.size() == eigenvalues.size() && b.size() == eigenvalues.size(),
                        "rkhs_inner_truncated: coefficient and eigenvalue counts differ");
  if (!(eigenvalues.array() > 0.0).all())
    throw InvalidParameter("rkhs_inner_truncated: eigenvalues must be positive");
  return (a.array() * b.array() / eigenvalues.array()).sum();
}

/// |theta|_H^2 = sum_i theta_i^2 / lambda_i.
inline double rkhs_norm_truncated(const Eigen::Ref<const Eigen::VectorXd>& theta_coeffs,
                                  const Eigen::Ref<const Eigen::VectorXd>& eigenvalues) {
  return rkhs_inner_truncated(theta_coeffs, theta_coeffs, eigenvalues);
}

/// Coefficients lambda_i psi_i(x), i = 1..N, of the kernel section K(., x).
inline Eigen::VectorXd kernel_section_coefficients(const CovarianceKernel& kernel, double x, std::size_t terms) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(terms));
  for (std::size_t i = 0; i < terms; ++i)
    c(static_cast<Eigen::Index>(i)) = kernel.eigenvalue(i + 1) * kernel.eigenfunction(i + 1, x);
  return c;
}

inline Eigen::VectorXd analytic_eigenvalues(const CovarianceKernel& kernel, std::size_t terms) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(terms));
  for (std::size_t i = 0; i < terms; ++i) v(static_cast<Eigen::Index>(i)) = kernel.eigenvalue(i + 1);
  return v;
}

/// sum_{i <= N} lambda_i psi_i(x) psi_i(x'), the truncated Mercer expansion.
inline double mercer_truncated(const CovarianceKernel& kernel, double x, double xp, std::size_t terms) {
  double acc = 0.0;
  for (std::size_t i = terms; i >= 1; --i)
    acc += kernel.eigenvalue(i) * kernel.eigenfunction(i, x) * kernel.eigenfunction(i, xp);
  return acc;
}

/// Condition number above which gp_fit attaches a warning.
inline constexpr double kConditionWarning = 1e12;

class GPRegressionFit {
 public:
  GPRegressionFit(Eigen::VectorXd x, Eigen::VectorXd y, CovarianceKernel kernel, double sigma,
                  Eigen::LLT<Eigen::MatrixXd> factor, Eigen::VectorXd coefficients, Eigen::VectorXd whitened_y,
                  double condition, std::optional<std::string> warning)
      : x_(std::move(x)),
        y_(std::move(y)),
        kernel_(std::move(kernel)),
        sigma_(sigma),
        factor_(std::move(factor)),
        coefficients_(std::move(coefficients)),
        whitened_y_(std::move(whitened_y)),
        condition_(condition),
        warning_(std::move(warning)) {}

  const Eigen::VectorXd& x_train() const noexcept { return x_; }
  const Eigen::VectorXd& y_train() const noexcept { return y_; }
  const CovarianceKernel& kernel() const noexcept { return kernel_; }
  double sigma() const noexcept { return sigma_; }
  /// c = (K + sigma^2 I)^{-1} y.
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  /// Cholesky factor of K + sigma^2 I.
  const Eigen::LLT<Eigen::MatrixXd>& factor() const noexcept { return factor_; }
  /// L^{-1} y with K + sigma^2 I = L L^T.
  const Eigen::VectorXd& whitened_y() const noexcept { return whitened_y_; }
  double condition_estimate() const noexcept { return condition_; }
  const std::optional<std::string>& warning() const noexcept { return warning_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  CovarianceKernel kernel_;
  double sigma_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd coefficients_;
  Eigen::VectorXd whitened_y_;
  double condition_;
  std::optional<std::string> warning_;
};

inline GPRegressionFit gp_fit(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                              const CovarianceKernel& kernel, double sigma) {
  detail::require_param(sigma > 0.0 && std::isfinite(sigma), "gp_fit: sigma must be positive");
  detail::require_shape(x.size() == y.size() && x.size() >= 1, "gp_fit: x and y must have the same nonzero length");
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidParameter("gp_fit: training inputs must be distinct");

  Eigen::MatrixXd a = gram(kernel, x);
  a.diagonal().array() += sigma * sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw SingularSystem("gp_fit: K + sigma^2 I is not positive definite");
  const double rc = llt.rcond();
  if (!(rc > 0.0)) throw SingularSystem("gp_fit: K + sigma^2 I is singular");
  const double condition = 1.0 / rc;
  std::optional<std::string> warning;
  if (condition > kConditionWarning) {
    std::ostringstream msg;
    msg << "gp_fit: K + sigma^2 I is ill-conditioned (condition estimate " << condition << ")";
    warning = msg.str();
  }
  Eigen::VectorXd coefficients = llt.solve(y);
  Eigen::VectorXd whitened = llt.matrixL().solve(y);
  return GPRegressionFit(x, y, kernel, sigma, std::move(llt), std::move(coefficients), std::move(whitened),
                         condition, std::move(warning));
}

struct GpPrediction {
  double mean;
  double variance;
};

/// Posterior mean s^T (K + sigma^2 I)^{-1} y and variance
/// K(x*, x*) - s^T (K + sigma^2 I)^{-1} s, both through the Cholesky factor.
inline GpPrediction gp_predict(const GPRegressionFit& fit, double x_star) {
  const auto n = fit.x_train().size();
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = fit.kernel()(x_star, fit.x_train()(i));
  const Eigen::VectorXd w = fit.factor().matrixL().solve(s);
  const double mean = w.dot(fit.whitened_y());
  double var = fit.kernel()(x_star, x_star) - w.squaredNorm();
  if (var < 0.0) {
    if (var < -1e-10) throw NumericalFailure("gp_predict: negative predictive variance");
    var = 0.0;
  }
  return {mean, var};
}

/// sum_i c_i K(x*, x_i), the representer form of the posterior mean.
inline double representer_mean(const GPRegressionFit& fit, double x_star) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < fit.x_train().size(); ++i)
    acc += fit.coefficients()(i) * fit.kernel()(x_star, fit.x_train()(i));
  return acc;
}

}  // namespace bayesinv::gp

#endif  // BAYESINV_GP_HPP
