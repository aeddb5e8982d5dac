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

#ifndef BAYESINV_FORWARD_OPS_HPP
#define BAYESINV_FORWARD_OPS_HPP

/** @file
 * Linear forward operators G(x, theta) = int K(x, t) theta(t) dt and their
 * left-endpoint discretizations on regular grids.
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Core>

#include "bayesinv/errors.hpp"
#include "bayesinv/grid.hpp"
#include "bayesinv/random.hpp"

namespace bayesinv::forward {

/// Scalar integral kernels K(x, t).
namespace kernels {

inline double sinc(double z) noexcept {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

inline double gaussian_blur(double x, double t, double psi) noexcept {
  const double d = x - t;
  return std::exp(-d * d / (2.0 * psi * psi)) / std::sqrt(2.0 * std::numbers::pi * psi * psi);
}

/// H(x - t): slowness at depth t contributes to travel time at depth x iff t <= x.
inline double heaviside(double x, double t) noexcept { return t <= x ? 1.0 : 0.0; }

inline double gravity(double x, double t, double h) noexcept {
  const double d = t - x;
  return h / std::pow(d * d + h * h, 1.5);
}

inline double diffraction(double s, double theta) noexcept {
  const double c = std::cos(s) + std::cos(theta);
  const double g = sinc(std::numbers::pi * (std::sin(s) + std::sin(theta)));
  return c * c * g * g;
}

/// Advection-diffusion Green's function f(x, tau); zero for tau <= 0.
inline double groundwater(double x, double tau, double diffusion, double velocity) noexcept {
  if (tau <= 0.0) return 0.0;
  const double r = x - velocity * tau;
  return x / (2.0 * std::sqrt(std::numbers::pi * diffusion * tau * tau * tau)) *
         std::exp(-r * r / (4.0 * diffusion * tau));
}

}  // namespace kernels

namespace tag {
struct GaussianBlur {
  double psi;
};
struct Heaviside {};
struct Gravity {
  double h;
};
struct Diffraction {};
struct Groundwater {
  double diffusion;
  double velocity;
  double x_obs;
  double horizon;
};
struct Identity {};
struct Custom {
  std::string name;
};
}  // namespace tag

using KernelTag = std::variant<tag::GaussianBlur, tag::Heaviside, tag::Gravity, tag::Diffraction,
                               tag::Groundwater, tag::Identity, tag::Custom>;

inline std::string tag_name(const KernelTag& t) {
  struct Visitor {
    std::string operator()(const tag::GaussianBlur&) const { return "gaussian_blur"; }
    std::string operator()(const tag::Heaviside&) const { return "heaviside"; }
    std::string operator()(const tag::Gravity&) const { return "gravity"; }
    std::string operator()(const tag::Diffraction&) const { return "diffraction"; }
    std::string operator()(const tag::Groundwater&) const { return "groundwater"; }
    std::string operator()(const tag::Identity&) const { return "identity"; }
    std::string operator()(const tag::Custom& c) const { return "custom:" + c.name; }
  };
  return std::visit(Visitor{}, t);
}

/// Dense m x n discretization of an integral operator. Rows are observation
/// points, columns are quadrature nodes.
class ForwardOperator {
 public:
  ForwardOperator(Eigen::MatrixXd matrix, Grid rows, Grid cols, KernelTag tag)
      : matrix_(std::move(matrix)), rows_(rows), cols_(cols), tag_(std::move(tag)) {
    detail::require_shape(matrix_.rows() == static_cast<Eigen::Index>(rows_.size()) &&
                              matrix_.cols() == static_cast<Eigen::Index>(cols_.size()),
                          "ForwardOperator: matrix shape does not match grids");
    if (!matrix_.allFinite()) throw NumericalFailure("ForwardOperator: non-finite matrix entry");
  }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Grid& row_grid() const noexcept { return rows_; }
  const Grid& col_grid() const noexcept { return cols_; }
  const KernelTag& kernel_tag() const noexcept { return tag_; }
  Eigen::Index rows() const noexcept { return matrix_.rows(); }
  Eigen::Index cols() const noexcept { return matrix_.cols(); }

 private:
  Eigen::MatrixXd matrix_;
  Grid rows_;
  Grid cols_;
  KernelTag tag_;
};

/// Entry (i, j) = kernel(x_i, t_j) * dt with dt the column spacing.
template <typename Kernel>
ForwardOperator discretize(const Grid& rows, const Grid& cols, Kernel&& kernel, KernelTag tag) {
  const double dt = cols.spacing();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double t = cols.node(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = kernel(rows.node(static_cast<std::size_t>(i)), t) * dt;
  }
  return ForwardOperator(std::move(m), rows, cols, std::move(tag));
}

inline ForwardOperator make_gaussian_blur(const Grid& grid, double psi) {
  detail::require_param(psi > 0.0 && std::isfinite(psi), "make_gaussian_blur: psi must be positive");
  return discretize(
      grid, grid, [psi](double x, double t) { return kernels::gaussian_blur(x, t, psi); },
      tag::GaussianBlur{psi});
}

/// Vertical seismic profiling: t(z) = int_0^z s(u) du.
inline ForwardOperator make_travel_time(const Grid& grid) {
  detail::require_param(grid.a() >= 0.0, "make_travel_time: depth grid must start at z >= 0");
  return discretize(grid, grid, kernels::heaviside, tag::Heaviside{});
}

inline ForwardOperator make_gravity(const Grid& grid, double h) {
  detail::require_param(h > 0.0 && std::isfinite(h), "make_gravity: height h must be positive");
  return discretize(
      grid, grid, [h](double x, double t) { return kernels::gravity(x, t, h); }, tag::Gravity{h});
}

inline ForwardOperator make_diffraction(const Grid& grid) {
  return discretize(grid, grid, kernels::diffraction, tag::Diffraction{});
}

/// Concentration C(x_obs, T_i) at the observation times of \p obs_times from an
/// injection history sampled on [0, horizon) with as many nodes as \p obs_times.
inline ForwardOperator make_groundwater(const Grid& obs_times, double diffusion, double velocity,
                                        double x_obs, double horizon) {
  detail::require_param(diffusion > 0.0 && std::isfinite(diffusion),
                        "make_groundwater: diffusion D must be positive");
  detail::require_param(horizon > 0.0 && std::isfinite(horizon),
                        "make_groundwater: time horizon T must be positive");
  detail::require_param(x_obs > 0.0 && std::isfinite(x_obs),
                        "make_groundwater: observation distance must be positive");
  detail::require_param(std::isfinite(velocity), "make_groundwater: velocity must be finite");
  const Grid injection(0.0, horizon, obs_times.size());
  return discretize(
      obs_times, injection,
      [=](double t_obs, double t) {
        return kernels::groundwater(x_obs, t_obs - t, diffusion, velocity);
      },
      tag::Groundwater{diffusion, velocity, x_obs, horizon});
}

inline ForwardOperator make_identity(const Grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return ForwardOperator(Eigen::MatrixXd::Identity(n, n), grid, grid, tag::Identity{});
}

inline Eigen::VectorXd apply(const ForwardOperator& op, const Eigen::Ref<const Eigen::VectorXd>& theta) {
  detail::require_shape(theta.size() == op.cols(),
                        "apply: theta has " + std::to_string(theta.size()) + " entries, operator has " +
                            std::to_string(op.cols()) + " columns");
  return op.matrix() * theta;
}

/// y = K theta + eps with eps iid N(0, sigma^2).
inline Eigen::VectorXd simulate_data(const ForwardOperator& op,
                                     const Eigen::Ref<const Eigen::VectorXd>& theta_true, double sigma,
                                     std::uint64_t seed) {
  detail::require_param(sigma >= 0.0 && std::isfinite(sigma), "simulate_data: sigma must be >= 0");
  Eigen::VectorXd y = apply(op, theta_true);
  if (sigma == 0.0) return y;
  Rng rng = make_rng(seed);
  y += sigma * standard_normal_vector(y.size(), rng);
  return y;
}

}  // namespace bayesinv::forward

#endif  // BAYESINV_FORWARD_OPS_HPP
