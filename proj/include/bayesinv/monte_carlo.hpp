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

#ifndef BAYESINV_MONTE_CARLO_HPP
#define BAYESINV_MONTE_CARLO_HPP

/** @file
 * Replicated calibration experiments. Replication r draws from
 * make_rng(seed, r) and writes only its own result slot, so the output does
 * not depend on the number of workers or their scheduling.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "bayesinv/calibration.hpp"
#include "bayesinv/errors.hpp"
#include "bayesinv/random.hpp"

namespace bayesinv::monte_carlo {

using calibration::CalibrationData;
using calibration::CalibrationEstimates;
using calibration::ConfidenceSet;

/// Runs body(r, rng) for r in [0, count) on up to \p workers threads
/// (0 = hardware concurrency). The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::uint64_t seed, Body&& body, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        Rng rng = make_rng(seed, r);
        body(r, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

struct CalibrationSimConfig {
  std::size_t n = 30;
  std::size_t m = 1;
  double alpha = 0.0;   ///< regression intercept
  double beta = 5.0;
  double sigma = 1.0;   ///< sigma = tau
  double x_tilde = 0.5;
  std::size_t replications = 10000;
  double level = 0.05;  ///< confidence-set alpha
};

/// Equally spaced design on [-1, 1].
inline Eigen::VectorXd design(std::size_t n) {
  detail::require_param(n >= 3, "design: need n >= 3");
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -1.0, 1.0);
}

inline CalibrationData simulate_calibration(const CalibrationSimConfig& cfg, Rng& rng) {
  const Eigen::VectorXd x = design(cfg.n);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = cfg.alpha + cfg.beta * x(i) + cfg.sigma * normal(rng);
  Eigen::VectorXd y_new(static_cast<Eigen::Index>(cfg.m));
  for (Eigen::Index j = 0; j < y_new.size(); ++j) y_new(j) = cfg.alpha + cfg.beta * cfg.x_tilde + cfg.sigma * normal(rng);
  return CalibrationData::from_raw(x, y, y_new);
}

struct ReplicationRecord {
  std::size_t replication;
  double x_classical;
  double x_inverse;
  ConfidenceSet::Kind kind;
  double lower;
  double upper;
  bool covered;
};

inline void validate(const CalibrationSimConfig& cfg) {
  detail::require_param(cfg.n >= 3, "simulation: need n >= 3");
  detail::require_param(cfg.m >= 1, "simulation: need m >= 1");
  detail::require_param(cfg.sigma > 0.0 && std::isfinite(cfg.sigma), "simulation: sigma must be positive");
  detail::require_param(std::isfinite(cfg.beta) && std::isfinite(cfg.alpha) && std::isfinite(cfg.x_tilde),
                        "simulation: non-finite model parameter");
  detail::require_param(cfg.replications >= 1, "simulation: need at least one replication");
  detail::require_param(cfg.level > 0.0 && cfg.level < 1.0, "simulation: level must lie in (0, 1)");
}

/// One record per replication, in raw covariate units. Coverage is only
/// evaluated for m = 1.
inline std::vector<ReplicationRecord> run_replications(const CalibrationSimConfig& cfg, std::uint64_t seed,
                                                       unsigned workers = 0) {
  validate(cfg);
  std::vector<ReplicationRecord> out(cfg.replications);
  parallel_for(
      cfg.replications, seed,
      [&](std::size_t r, Rng& rng) {
        const CalibrationData data = simulate_calibration(cfg, rng);
        const CalibrationEstimates est = fit_calibration(data);
        const double off = data.offset();
        ReplicationRecord rec{r, est.x_classical + off, est.x_inverse + off, ConfidenceSet::Kind::WholeLine,
                              0.0, 0.0, true};
        if (cfg.m == 1) {
          const ConfidenceSet set = confidence_set(est, cfg.level);
          rec.kind = set.kind;
          rec.lower = set.lower + off;
          rec.upper = set.upper + off;
          rec.covered = set.contains(cfg.x_tilde - data.offset());
        }
        out[r] = rec;
      },
      workers);
  return out;
}

struct CoverageSummary {
  std::size_t replications;
  double coverage;
  std::size_t intervals;
  std::size_t complements;
  std::size_t whole_lines;
};

inline CoverageSummary summarize_coverage(const std::vector<ReplicationRecord>& records) {
  CoverageSummary s{records.size(), 0.0, 0, 0, 0};
  std::size_t hits = 0;
  for (const auto& r : records) {
    hits += r.covered ? 1 : 0;
    if (r.kind == ConfidenceSet::Kind::Interval) ++s.intervals;
    if (r.kind == ConfidenceSet::Kind::Complement) ++s.complements;
    if (r.kind == ConfidenceSet::Kind::WholeLine) ++s.whole_lines;
  }
  s.coverage = records.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(records.size());
  return s;
}

struct RiskSummary {
  std::size_t replications;
  double mse_inverse_half;  ///< over the first half of the replications
  double mse_inverse_full;
  double mse_classical_half;
  double mse_classical_full;
  double max_abs_classical;
  double median_abs_classical;
};

inline RiskSummary summarize_risk(const std::vector<ReplicationRecord>& records, double x_tilde) {
  detail::require_param(records.size() >= 2, "summarize_risk: need at least two replications");
  const std::size_t half = records.size() / 2;
  double si = 0.0;
  double sc = 0.0;
  double si_half = 0.0;
  double sc_half = 0.0;
  std::vector<double> abs_c;
  abs_c.reserve(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    const double ei = records[r].x_inverse - x_tilde;
    const double ec = records[r].x_classical - x_tilde;
    si += ei * ei;
    sc += ec * ec;
    if (r < half) {
      si_half += ei * ei;
      sc_half += ec * ec;
    }
    abs_c.push_back(std::abs(records[r].x_classical));
  }
  std::sort(abs_c.begin(), abs_c.end());
  const std::size_t k = abs_c.size();
  const double median = k % 2 == 1 ? abs_c[k / 2] : 0.5 * (abs_c[k / 2 - 1] + abs_c[k / 2]);
  const double nf = static_cast<double>(k);
  const double nh = static_cast<double>(half);
  return {k, si_half / nh, si / nf, sc_half / nh, sc / nf, abs_c.back(), median};
}

/// Coverage defaults: beta = 5, sigma = 1, n = 30, m = 1.
inline CalibrationSimConfig coverage_defaults() { return {}; }

/// Risk defaults: beta = 1, sigma = 1, n = 20, m = 1, x~ = 0.5.
inline CalibrationSimConfig risk_defaults() {
  CalibrationSimConfig c;
  c.n = 20;
  c.beta = 1.0;
  return c;
}

}  // namespace bayesinv::monte_carlo

#endif  // BAYESINV_MONTE_CARLO_HPP
