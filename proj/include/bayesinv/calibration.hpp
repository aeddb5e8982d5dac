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

#ifndef BAYESINV_CALIBRATION_HPP
#define BAYESINV_CALIBRATION_HPP

/** @file
 * Linear calibration: y_i = alpha + beta x_i + sigma eps_i (training) and
 * y~_j = alpha + beta x~ + sigma eps~_j (m new responses at an unknown x~).
 *
 * Covariates are centered on construction and every estimate is reported in
 * centered units. The t pivot, the F-based confidence set and the posterior
 * of Hoadley's analysis are stated for designs with sum x_i = 0 and
 * sum x_i^2 = n, so they are evaluated in standardized units
 * z = x sqrt(n / Sxx) and mapped back.
 */

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include <boost/math/distributions/fisher_f.hpp>
#include <Eigen/Core>

#include "bayesinv/density.hpp"
#include "bayesinv/errors.hpp"

namespace bayesinv::calibration {

class CalibrationData {
 public:
  /// Centers \p x; keeps the removed mean as offset().
  static CalibrationData from_raw(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const Eigen::Ref<const Eigen::VectorXd>& y_new) {
    detail::require_shape(x.size() == y.size(), "CalibrationData: x and y lengths differ");
    if (x.size() < 3) throw InvalidParameter("CalibrationData: need n >= 3 training pairs");
    if (y_new.size() < 1) throw InvalidParameter("CalibrationData: need m >= 1 new responses");
    if (!x.allFinite() || !y.allFinite() || !y_new.allFinite())
      throw InvalidParameter("CalibrationData: non-finite input");
    const double offset = x.mean();
    Eigen::VectorXd xc = x.array() - offset;
    xc.array() -= xc.mean();
    return CalibrationData(std::move(xc), y, y_new, offset);
  }

  const Eigen::VectorXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::VectorXd& y_new() const noexcept { return y_new_; }
  /// Mean of the raw covariates; raw x = centered x + offset.
  double offset() const noexcept { return offset_; }
  Eigen::Index n() const noexcept { return x_.size(); }
  Eigen::Index m() const noexcept { return y_new_.size(); }

 private:
  CalibrationData(Eigen::VectorXd x, Eigen::VectorXd y, Eigen::VectorXd y_new, double offset)
      : x_(std::move(x)), y_(std::move(y)), y_new_(std::move(y_new)), offset_(offset) {}

  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd y_new_;
  double offset_;
};

struct CalibrationEstimates {
  double alpha_hat;
  double beta_hat;
  double gamma_hat;
  double delta_hat;
  double x_classical;
  double x_inverse;
  double sigma2_1;
  std::optional<double> sigma2_2;  ///< only for m >= 2
  double sigma2_pooled;
  double f_stat;  ///< Sxx beta^2 / sigma^2, equal to n beta^2 / sigma^2 on a standardized design
  Eigen::Index n;
  Eigen::Index m;
  double sxx;
  double y_bar;
  double y_new_bar;
  double offset;

  /// z = x * standardize() maps centered covariates to the standardized design.
  double standardize() const { return std::sqrt(static_cast<double>(n) / sxx); }
  /// F / (F + m + n - 3).
  double r_ratio() const {
    const double dof = static_cast<double>(m + n - 3);
    return std::isinf(f_stat) ? 1.0 : f_stat / (f_stat + dof);
  }
};

inline CalibrationEstimates fit_calibration(const CalibrationData& data) {
  const Eigen::VectorXd& x = data.x();
  const Eigen::VectorXd& y = data.y();
  const auto n = data.n();
  const auto m = data.m();
  const double x_bar = x.mean();
  const double y_bar = y.mean();
  const Eigen::VectorXd dx = x.array() - x_bar;
  const Eigen::VectorXd dy = y.array() - y_bar;
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  const double sxy = dx.dot(dy);
  if (!(sxx > 0.0)) throw DegenerateData("fit_calibration: covariate variance Sxx is zero");
  if (!(syy > 0.0)) throw DegenerateData("fit_calibration: response variance Syy is zero (delta_hat undefined)");

  CalibrationEstimates e{};
  e.n = n;
  e.m = m;
  e.sxx = sxx;
  e.offset = data.offset();
  e.y_bar = y_bar;
  e.beta_hat = sxy / sxx;
  e.alpha_hat = y_bar - e.beta_hat * x_bar;
  e.delta_hat = sxy / syy;
  e.gamma_hat = x_bar - e.delta_hat * y_bar;
  e.y_new_bar = data.y_new().mean();
  if (e.beta_hat == 0.0) throw DegenerateData("fit_calibration: beta_hat is exactly zero (x_classical undefined)");
  e.x_classical = (e.y_new_bar - e.alpha_hat) / e.beta_hat;
  e.x_inverse = e.gamma_hat + e.delta_hat * e.y_new_bar;

  const Eigen::VectorXd resid = y.array() - e.alpha_hat - e.beta_hat * x.array();
  e.sigma2_1 = resid.squaredNorm() / static_cast<double>(n - 2);
  if (m >= 2) {
    const double ss2 = (data.y_new().array() - e.y_new_bar).matrix().squaredNorm();
    e.sigma2_2 = ss2 / static_cast<double>(m - 1);
    e.sigma2_pooled = (static_cast<double>(n - 2) * e.sigma2_1 + static_cast<double>(m - 1) * *e.sigma2_2) /
                      static_cast<double>(n - 2 + m - 1);
  } else {
    e.sigma2_pooled = e.sigma2_1;
  }
  e.f_stat = e.sigma2_pooled > 0.0 ? sxx * e.beta_hat * e.beta_hat / e.sigma2_pooled
                                   : std::numeric_limits<double>::infinity();
  return e;
}

struct ConfidenceSet {
  enum class Kind { Interval, Complement, WholeLine };
  Kind kind;
  double lower;  ///< x_L (centered units); meaningless for WholeLine
  double upper;  ///< x_U
  bool uninformative;

  bool contains(double x) const noexcept {
    switch (kind) {
      case Kind::Interval: return x >= lower && x <= upper;
      case Kind::Complement: return x <= lower || x >= upper;
      case Kind::WholeLine: return true;
    }
    return true;
  }
};

inline std::string kind_name(ConfidenceSet::Kind k) {
  switch (k) {
    case ConfidenceSet::Kind::Interval: return "interval";
    case ConfidenceSet::Kind::Complement: return "complement";
    case ConfidenceSet::Kind::WholeLine: return "whole_line";
  }
  return "unknown";
}

/// Upper-alpha point of F(1, nu).
inline double f_upper(double alpha, double nu) {
  boost::math::fisher_f_distribution<double> dist(1.0, nu);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

/// The set {x : F (x_C - x)^2 <= F_{alpha;1,n-2} (n + 1 + x^2)} in standardized
/// units, i.e. the values not rejected by the t pivot. Requires m = 1.
inline ConfidenceSet confidence_set(const CalibrationEstimates& est, double alpha) {
  detail::require_param(alpha > 0.0 && alpha < 1.0, "confidence_set: alpha must lie in (0, 1)");
  if (est.m != 1) throw InvalidParameter("confidence_set: defined for m = 1 new response");
  const double n = static_cast<double>(est.n);
  const double k = est.standardize();
  const double zc = est.x_classical * k;
  const double fa = f_upper(alpha, n - 2.0);
  const double f = est.f_stat;
  if (std::isinf(f)) return {ConfidenceSet::Kind::Interval, est.x_classical, est.x_classical, false};

  const double lower_threshold = (n + 1.0) / (n + 1.0 + zc * zc) * fa;
  if (f < lower_threshold) {
    const double inf = std::numeric_limits<double>::infinity();
    return {ConfidenceSet::Kind::WholeLine, -inf, inf, true};
  }
  const double denom = f - fa;
  if (denom == 0.0) {
    // Degenerate quadratic: a half line on the side of x_C.
    const double root = (f * zc * zc - fa * (n + 1.0)) / (2.0 * f * zc);
    const double inf = std::numeric_limits<double>::infinity();
    if (zc > 0.0) return {ConfidenceSet::Kind::Interval, root / k, inf, false};
    return {ConfidenceSet::Kind::Interval, -inf, root / k, false};
  }
  const double disc = std::sqrt(std::max(0.0, fa * ((n + 1.0) * denom + f * zc * zc)));
  double a = (f * zc - disc) / denom;
  double b = (f * zc + disc) / denom;
  if (a > b) std::swap(a, b);
  const auto kind = f > fa ? ConfidenceSet::Kind::Interval : ConfidenceSet::Kind::Complement;
  return {kind, a / k, b / k, false};
}

/// Log prior density on centered x, up to a constant.
struct Prior {
  std::function<double(double)> log_density;
  std::string name;
};

inline Prior flat_prior() {
  return {[](double) { return 0.0; }, "flat"};
}

/// x ~ t_{n-3} * sqrt((n + 1) / (n - 3)) in standardized units.
inline Prior hoadley_informative_prior(const CalibrationEstimates& est) {
  const double n = static_cast<double>(est.n);
  if (est.n < 4) throw InvalidParameter("hoadley_informative_prior: needs n >= 4 (t_{n-3} prior)");
  const double k = est.standardize();
  return {[n, k](double x) {
            const double z = x * k;
            return -0.5 * (n - 2.0) * std::log1p(z * z / (n + 1.0));
          },
          "hoadley_informative"};
}

/// log L(x) on standardized z.
inline double hoadley_log_likelihood(const CalibrationEstimates& est, double z) {
  const double n = static_cast<double>(est.n);
  const double m = static_cast<double>(est.m);
  const double dof = m + n - 3.0;
  const double r = est.r_ratio();
  const double zc = est.x_classical * est.standardize();
  const double c = 1.0 + n / m;
  const double dev = z - r * zc;
  const double num = 0.5 * dof * std::log(c + z * z);
  const double den = 0.5 * (m + n - 2.0) * std::log(c + r * zc * zc + (est.f_stat / dof + 1.0) * dev * dev);
  return num - den;
}

struct TPosterior {
  double location;
  double scale;
  int df;
};

/// Posterior of x as location + t_df * scale under the informative prior, m = 1.
inline TPosterior hoadley_t_posterior(const CalibrationEstimates& est) {
  if (est.m != 1) throw InvalidParameter("hoadley_t_posterior: defined for m = 1");
  if (est.f_stat == 0.0) throw DegenerateData("hoadley_t_posterior: F = 0 gives R = 0");
  if (std::isinf(est.f_stat)) throw DegenerateData("hoadley_t_posterior: residual variance is zero (F infinite)");
  const double n = static_cast<double>(est.n);
  const double k = est.standardize();
  const double zi = est.x_inverse * k;
  const double scale_z = std::sqrt((n + 1.0 + zi * zi / est.r_ratio()) / (est.f_stat + n - 2.0));
  return {est.x_inverse, scale_z / k, static_cast<int>(est.n) - 2};
}

inline Density1D hoadley_posterior(const CalibrationData& data, const Prior& prior) {
  const CalibrationEstimates est = fit_calibration(data);
  if (std::isinf(est.f_stat))
    throw DegenerateData("hoadley_posterior: residual variance is zero; the likelihood is degenerate");
  if (est.f_stat == 0.0) throw DegenerateData("hoadley_posterior: F = 0");
  const double k = est.standardize();
  const double n = static_cast<double>(est.n);
  const double zi = est.r_ratio() * est.x_classical * k;
  const double spread = std::sqrt((n + 1.0 + zi * zi / est.r_ratio()) / (est.f_stat + n - 2.0));
  auto log_density = [est, k, lp = prior.log_density](double x) {
    return lp(x) + hoadley_log_likelihood(est, x * k);
  };
  const double inf = std::numeric_limits<double>::infinity();
  return Density1D(log_density, -inf, inf, {zi / k, spread / k});
}

}  // namespace bayesinv::calibration

#endif  // BAYESINV_CALIBRATION_HPP
