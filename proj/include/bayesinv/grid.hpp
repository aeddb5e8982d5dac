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

#ifndef BAYESINV_GRID_HPP
#define BAYESINV_GRID_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "bayesinv/errors.hpp"

namespace bayesinv {

/// Regular left-endpoint grid on [a, b): node i sits at a + i (b - a) / n.
class Grid {
 public:
  Grid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
    detail::require_param(std::isfinite(a) && std::isfinite(b) && b > a,
                          "Grid: need finite a < b");
    detail::require_param(n >= 2, "Grid: need at least 2 nodes, got " + std::to_string(n));
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return (b_ - a_) / static_cast<double>(n_); }
  double node(std::size_t i) const noexcept {
    return a_ + static_cast<double>(i) * (b_ - a_) / static_cast<double>(n_);
  }

  Eigen::VectorXd nodes() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) out(static_cast<Eigen::Index>(i)) = node(i);
    return out;
  }

  /// Index of the node equal to x (within a small fraction of the spacing), or -1.
  long index_of(double x) const noexcept {
    const double pos = (x - a_) / spacing();
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(n_)) return -1;
    return static_cast<long>(r);
  }

  bool operator==(const Grid&) const = default;

 private:
  double a_;
  double b_;
  std::size_t n_;
};

}  // namespace bayesinv

#endif  // BAYESINV_GRID_HPP
