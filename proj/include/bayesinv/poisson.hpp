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

#ifndef BAYESINV_POISSON_HPP
#define BAYESINV_POISSON_HPP

/** @file
 * Leave-one-out posterior of a covariate under y_j ~ Poisson(theta x_j).
 *
 * Integrating theta out under a flat prior leaves
 *
 *     pi(x_i | rest) ~ x_i^a (x_i + s)^{-c},  a = y_i, c = N + 1, s = sum_{j != i} x_j,
 *
 * a scaled beta-prime law: x_i / s ~ BetaPrime(a + 1, c - a - 1).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bayesinv/density.hpp"
#include "bayesinv/errors.hpp"
#include "bayesinv/random.hpp"

namespace bayesinv::poisson {

/// Closed-form quantities of the scaled beta-prime posterior.
struct BetaPrimeMoments {
  double a;
  double c;
  double s;
  /// log of int_0^inf x^a (x + s)^{-c} dx = s^{a+1-c} B(a+1, c-a-1).
  double log_normalizer;
  double mean;                    ///< s (a + 1) / (c - a - 2)
  std::optional<double> variance;  ///< needs c - a > 3
};

inline BetaPrimeMoments beta_prime_moments(double a, double c, double s) {
  detail::require_param(s > 0.0 && a >= 0.0, "beta_prime_moments: need s > 0 and a >= 0");
  if (!(c - a > 2.0))
    throw NormalizationFailure("poisson posterior: N - y_i must exceed 1 for the posterior to be proper");
  BetaPrimeMoments out{a, c, s, 0.0, 0.0, std::nullopt};
  out.log_normalizer = (a + 1.0 - c) * std::log(s) + std::lgamma(a + 1.0) + std::lgamma(c - a - 1.0) - std::lgamma(c);
  out.mean = s * (a + 1.0) / (c - a - 2.0);
  if (c - a > 3.0) {
    const double second = s * s * (a + 1.0) * (a + 2.0) / ((c - a - 2.0) * (c - a - 3.0));
    out.variance = second - out.mean * out.mean;
  }
  return out;
}

struct XvalPosterior {
  Density1D density;
  BetaPrimeMoments closed_form;
};

inline XvalPosterior poisson_xval_posterior(std::span<const double> x_all, std::span<const std::int64_t> y_all,
                                            std::size_t held_out) {
  detail::require_shape(x_all.size() == y_all.size(), "poisson_xval_posterior: x and y lengths differ");
  if (held_out >= x_all.size())
    throw InvalidParameter("poisson_xval_posterior: held-out index " + std::to_string(held_out) + " out of range");
  double s = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < x_all.size(); ++j) {
    detail::require_param(x_all[j] > 0.0 && std::isfinite(x_all[j]), "poisson_xval_posterior: covariates must be positive");
    detail::require_param(y_all[j] >= 0, "poisson_xval_posterior: counts must be non-negative");
    total += static_cast<double>(y_all[j]);
    if (j != held_out) s += x_all[j];
  }
  const double a = static_cast<double>(y_all[held_out]);
  const double c = total + 1.0;
  if (!(total - a > 1.0))
    throw NormalizationFailure("poisson_xval_posterior: N - y_i = " + std::to_string(total - a) +
                               " <= 1, the leave-one-out posterior is not normalizable");
  const BetaPrimeMoments cf = beta_prime_moments(a, c, s);

  // a log x - c log(x + s), written with log1p so large s keeps full precision.
  const double log_s = std::log(s);
  auto log_density = [a, c, s, log_s](double x) {
    if (x <= 0.0) return a == 0.0 ? -c * log_s : -std::numeric_limits<double>::infinity();
    return a * std::log(x) - c * (log_s + std::log1p(x / s));
  };
  const double spread = cf.variance ? std::sqrt(*cf.variance) : cf.mean;
  Density1D density(log_density, 0.0, std::numeric_limits<double>::infinity(),
                    {cf.mean, std::max(spread, 1e-12 * s)});
  return {std::move(density), cf};
}

struct PoissonSample {
  std::vector<double> x;
  std::vector<std::int64_t> y;
};

/// x_i ~ U(0.5, 1.5), y_i ~ Poisson(theta x_i), drawn pairwise from make_rng(seed).
inline PoissonSample simulate_poisson_sequence(double theta, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  PoissonSample out{std::vector<double>(n), std::vector<std::int64_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.x[i] = unif(rng);
    std::poisson_distribution<std::int64_t> pois(theta * out.x[i]);
    out.y[i] = pois(rng);
  }
  return out;
}

struct InconsistencyRow {
  std::size_t n;
  double x_true;
  std::int64_t y_held;
  double mean;
  double sd_closed;
  double sd_quadrature;
};

/// Nested data: the set for each n is the first n pairs of one simulated
/// sequence, so the held-out pair is the same across rows.
inline std::vector<InconsistencyRow> inconsistency_experiment(double theta_true, std::span<const std::size_t> n_values,
                                                              std::uint64_t seed, std::size_t held_out = 9) {
  detail::require_param(theta_true > 0.0 && std::isfinite(theta_true), "inconsistency_experiment: theta must be positive");
  detail::require_param(!n_values.empty(), "inconsistency_experiment: empty n list");
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] < 3) throw InvalidParameter("inconsistency_experiment: each n must be >= 3");
    if (k > 0 && n_values[k] <= n_values[k - 1])
      throw InvalidParameter("inconsistency_experiment: n values must be increasing");
  }
  if (held_out >= n_values.front())
    throw InvalidParameter("inconsistency_experiment: held-out index must be below the smallest n");

  const PoissonSample sample = simulate_poisson_sequence(theta_true, n_values.back(), seed);
  const std::vector<double>& x = sample.x;
  const std::vector<std::int64_t>& y = sample.y;

  std::vector<InconsistencyRow> rows;
  rows.reserve(n_values.size());
  for (std::size_t n : n_values) {
    const XvalPosterior post = poisson_xval_posterior(std::span<const double>(x.data(), n),
                                                      std::span<const std::int64_t>(y.data(), n), held_out);
    if (!post.closed_form.variance)
      throw NormalizationFailure("inconsistency_experiment: posterior variance is infinite at n = " +
                                 std::to_string(n) + " (needs N - y_i > 2)");
    rows.push_back({n, x[held_out], y[held_out], post.closed_form.mean, std::sqrt(*post.closed_form.variance),
                    post.density.sd()});
  }
  return rows;
}

}  // namespace bayesinv::poisson

#endif  // BAYESINV_POISSON_HPP
