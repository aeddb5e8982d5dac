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

#ifndef BAYESINV_KERNELS_HPP
#define BAYESINV_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "bayesinv/errors.hpp"
#include "bayesinv/grid.hpp"
#include "bayesinv/spectral.hpp"

namespace bayesinv::gp {

namespace tag {
struct OrnsteinUhlenbeck {
  double b;
};
struct SquaredExponential {
  double b;
  int d;
};
struct BrownianMotion {};
struct SplineCubic {
  std::size_t order;  ///< penalty order m; 2 is the cubic spline.
};
struct SpectralNumeric {
  std::vector<double> b;
};
struct Custom {
  std::string name;
};
}  // namespace tag

using CovarianceTag = std::variant<tag::OrnsteinUhlenbeck, tag::SquaredExponential, tag::BrownianMotion,
                                   tag::SplineCubic, tag::SpectralNumeric, tag::Custom>;

/// Eigen-system under the uniform measure on [0, 1]; indices start at 1 and
/// eigenvalues are non-increasing.
struct EigenSystem {
  std::function<double(std::size_t)> value;
  std::function<double(std::size_t, double)> function;
};

class CovarianceKernel {
 public:
  using Function = std::function<double(double, double)>;

  CovarianceKernel(Function f, CovarianceTag tag, std::optional<EigenSystem> eigen = std::nullopt,
                   double scale = 1.0)
      : f_(std::move(f)), tag_(std::move(tag)), eigen_(std::move(eigen)), scale_(scale) {}

  double operator()(double x, double xp) const { return scale_ * f_(x, xp); }

  const CovarianceTag& tag() const noexcept { return tag_; }
  double scale() const noexcept { return scale_; }
  bool has_analytic_eigen() const noexcept { return eigen_.has_value(); }

  double eigenvalue(std::size_t j) const {
    if (!eigen_) throw UsageError("kernel " + name() + " has no analytic eigen-system");
    return scale_ * eigen_->value(j);
  }
  double eigenfunction(std::size_t j, double x) const {
    if (!eigen_) throw UsageError("kernel " + name() + " has no analytic eigen-system");
    return eigen_->function(j, x);
  }

  /// factor * K, keeping the eigenfunctions.
  CovarianceKernel scaled(double factor) const {
    detail::require_param(factor > 0.0 && std::isfinite(factor), "CovarianceKernel::scaled: factor must be positive");
    return CovarianceKernel(f_, tag_, eigen_, scale_ * factor);
  }

  std::string name() const {
    struct Visitor {
      std::string operator()(const tag::OrnsteinUhlenbeck&) const { return "ornstein_uhlenbeck"; }
      std::string operator()(const tag::SquaredExponential&) const { return "squared_exponential"; }
      std::string operator()(const tag::BrownianMotion&) const { return "brownian_motion"; }
      std::string operator()(const tag::SplineCubic&) const { return "spline"; }
      std::string operator()(const tag::SpectralNumeric&) const { return "spectral"; }
      std::string operator()(const tag::Custom& c) const { return "custom:" + c.name; }
    };
    return std::visit(Visitor{}, tag_);
  }

 private:
  Function f_;
  CovarianceTag tag_;
  std::optional<EigenSystem> eigen_;
  double scale_;
};

/// (1 / 2b) exp(-b |x - x'|).
inline CovarianceKernel ornstein_uhlenbeck(double b) {
  detail::require_param(b > 0.0 && std::isfinite(b), "ornstein_uhlenbeck: b must be positive");
  return CovarianceKernel([b](double x, double xp) { return std::exp(-b * std::abs(x - xp)) / (2.0 * b); },
                          tag::OrnsteinUhlenbeck{b});
}

/// (2 pi b^2)^{-d/2} exp(-|x - x'|^2 / (2 b^2)) for points in R^d.
inline double squared_exponential_nd(double b, std::span<const double> x, std::span<const double> xp) {
  detail::require_param(b > 0.0, "squared_exponential_nd: b must be positive");
  detail::require_shape(x.size() == xp.size() && !x.empty(), "squared_exponential_nd: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - xp[i]) * (x[i] - xp[i]);
  const double d = static_cast<double>(x.size());
  return std::exp(-r2 / (2.0 * b * b)) / std::pow(2.0 * std::numbers::pi * b * b, d / 2.0);
}

inline CovarianceKernel squared_exponential(double b) {
  detail::require_param(b > 0.0 && std::isfinite(b), "squared_exponential: b must be positive");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * b * b);
  return CovarianceKernel(
      [b, norm](double x, double xp) {
        const double r = x - xp;
        return norm * std::exp(-r * r / (2.0 * b * b));
      },
      tag::SquaredExponential{b, 1});
}

/// min(x, x'), with eigenpairs 1 / ((j - 1/2)^2 pi^2), sqrt(2) sin((j - 1/2) pi x).
inline CovarianceKernel brownian_motion() {
  EigenSystem eig{
      [](std::size_t j) {
        const double w = (static_cast<double>(j) - 0.5) * std::numbers::pi;
        return 1.0 / (w * w);
      },
      [](std::size_t j, double x) {
        return std::numbers::sqrt2 * std::sin((static_cast<double>(j) - 0.5) * std::numbers::pi * x);
      }};
  return CovarianceKernel([](double x, double xp) { return std::min(x, xp); }, tag::BrownianMotion{},
                          std::move(eig));
}

/// Stationary kernel obtained by numerically inverting the spectrum of the
/// penalty with coefficients \p b.
inline CovarianceKernel spectral_numeric(std::vector<double> b) {
  auto inverter = std::make_shared<const spectral::SpectralKernel>(spectral::PenaltyCoefficients(b));
  return CovarianceKernel([inverter](double x, double xp) { return (*inverter)(x - xp); },
                          tag::SpectralNumeric{std::move(b)});
}

/// A covariance matrix known only on the nodes of \p grid; evaluating off-grid
/// is a domain error.
inline CovarianceKernel tabulated_on_grid(const Grid& grid, Eigen::MatrixXd cov, std::string name) {
  detail::require_shape(cov.rows() == static_cast<Eigen::Index>(grid.size()) && cov.cols() == cov.rows(),
                        "tabulated_on_grid: covariance must be square with one row per node");
  auto table = std::make_shared<const Eigen::MatrixXd>(std::move(cov));
  return CovarianceKernel(
      [grid, table](double x, double xp) {
        const long i = grid.index_of(x);
        const long j = grid.index_of(xp);
        if (i < 0 || j < 0) throw DomainError("tabulated kernel evaluated off its grid");
        return (*table)(i, j);
      },
      tag::Custom{std::move(name)});
}

inline CovarianceKernel custom(CovarianceKernel::Function f, std::string name) {
  return CovarianceKernel(std::move(f), tag::Custom{std::move(name)});
}

}  // namespace bayesinv::gp

#endif  // BAYESINV_KERNELS_HPP
