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

#ifndef BAYESINV_DENSITY_HPP
#define BAYESINV_DENSITY_HPP

/** @file
 * One-dimensional densities known up to a constant, normalized by quadrature.
 *
 * The support is covered by a core window [c - s, c + s] around a caller hint
 * plus segments whose widths double outward. Expansion on each side stops at
 * the support bound or once two consecutive segments each carry less than
 * kTailTolerance of the accumulated mass.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "bayesinv/errors.hpp"

namespace bayesinv {

class Density1D {
 public:
  using LogDensity = std::function<double(double)>;

  /// Where the mass is expected; only affects efficiency and the shift.
  struct Hint {
    double center = 0.0;
    double scale = 1.0;
  };

  static constexpr double kTailTolerance = 1e-10;
  static constexpr int kMaxDoublings = 200;

  Density1D(LogDensity log_density, double lower, double upper, Hint hint)
      : log_density_(std::move(log_density)), lower_(lower), upper_(upper) {
    detail::require_param(lower_ < upper_, "Density1D: empty support");
    detail::require_param(std::isfinite(hint.center) && hint.scale > 0.0 && std::isfinite(hint.scale),
                          "Density1D: hint must have finite center and positive scale");
    center_ = std::clamp(hint.center, std::nextafter(lower_, upper_), std::nextafter(upper_, lower_));
    scale_ = hint.scale;
    if (std::isfinite(lower_) && std::isfinite(upper_)) scale_ = std::min(scale_, upper_ - lower_);
    shift_ = find_shift();
    build_segments();
  }

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  /// Unnormalized log density as supplied.
  double log_density(double x) const { return log_density_(x); }
  /// log int exp(log_density).
  double log_normalizer() const noexcept { return shift_ + std::log(mass_); }
  double normalizer() const noexcept { return std::exp(log_normalizer()); }

  double pdf(double x) const {
    if (x <= lower_ || x >= upper_) return 0.0;
    return std::exp(log_density_(x) - log_normalizer());
  }

  /// Integration window actually used; the mass outside is below the tail tolerance.
  std::pair<double, double> effective_support() const noexcept {
    return {segments_.front().a, segments_.back().b};
  }

  /// Normalized expectation of g, expanded with the same tail rule as the normalizer.
  double expectation(const std::function<double(double)>& g) const {
    return integrate_expanding([&](double x) { return g(x) * shifted(x); }, "expectation") / mass_;
  }

  double mean() const {
    return integrate_expanding([&](double x) { return x * shifted(x); }, "mean") / mass_;
  }

  double variance() const {
    const double mu = mean();
    return integrate_expanding([&](double x) { return (x - mu) * (x - mu) * shifted(x); }, "variance") / mass_;
  }

  double sd() const { return std::sqrt(variance()); }

  double cdf(double x) const {
    if (x <= segments_.front().a) return 0.0;
    if (x >= segments_.back().b) return 1.0;
    double acc = 0.0;
    for (const Segment& s : segments_) {
      if (x >= s.b) {
        acc += s.mass;
        continue;
      }
      acc += quad([&](double t) { return shifted(t); }, s.a, x);
      break;
    }
    return std::clamp(acc / mass_, 0.0, 1.0);
  }

  double quantile(double p) const {
    detail::require_param(p > 0.0 && p < 1.0, "Density1D::quantile: p must lie in (0, 1)");
    double cum = 0.0;
    for (const Segment& s : segments_) {
      const double next = cum + s.mass / mass_;
      if (next >= p || &s == &segments_.back()) {
        auto f = [&](double x) { return cum + quad([&](double t) { return shifted(t); }, s.a, x) / mass_ - p; };
        const double fa = cum - p;
        const double fb = next - p;
        if (fa >= 0.0) return s.a;
        if (fb <= 0.0) return s.b;
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, s.a, s.b, fa, fb, boost::math::tools::eps_tolerance<double>(48),
                                                   iters);
        return 0.5 * (r.first + r.second);
      }
      cum = next;
    }
    return segments_.back().b;
  }

 private:
  struct Segment {
    double a;
    double b;
    double mass;
  };

  double shifted(double x) const {
    const double v = std::exp(log_density_(x) - shift_);
    return std::isnan(v) ? 0.0 : v;
  }

  template <class F>
  static double quad(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
  }

  double find_shift() const {
    double best = -std::numeric_limits<double>::infinity();
    double best_x = center_;
    for (int k = -32; k <= 32; ++k) {
      const double x = center_ + scale_ * static_cast<double>(k) / 4.0;
      if (x <= lower_ || x >= upper_) continue;
      const double v = log_density_(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    if (!std::isfinite(best)) throw NormalizationFailure("Density1D: log density is not finite near the hint");
    const double lo = std::max(best_x - scale_ / 4.0, std::nextafter(lower_, upper_));
    const double hi = std::min(best_x + scale_ / 4.0, std::nextafter(upper_, lower_));
    auto neg = [&](double x) {
      const double v = log_density_(x);
      return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    };
    const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
    return std::max(best, -r.second);
  }

  /// Integrates f over the support, expanding outward from the core window.
  template <class F>
  double integrate_expanding(F&& f, const char* what, std::vector<Segment>* record = nullptr) const {
    const double core_a = std::max(lower_, center_ - scale_);
    const double core_b = std::min(upper_, center_ + scale_);
    const double core = quad(f, core_a, core_b);
    double total = core;
    std::vector<Segment> left;
    std::vector<Segment> right;

    auto expand = [&](int dir, std::vector<Segment>& out) {
      double edge = dir < 0 ? core_a : core_b;
      const double bound = dir < 0 ? lower_ : upper_;
      double width = scale_;
      int quiet = 0;
      for (int k = 0; k < kMaxDoublings; ++k) {
        if (edge == bound) return;
        double next = edge + dir * width;
        if (dir < 0 ? next <= bound : next >= bound) next = bound;
        const double a = std::min(edge, next);
        const double b = std::max(edge, next);
        double piece = 0.0;
        if (std::isfinite(next)) {
          piece = quad(f, a, b);
        } else {
          next = bound;
        }
        if (!std::isfinite(piece))
          throw NormalizationFailure(std::string("Density1D: non-finite quadrature while computing ") + what);
        out.push_back({a, b, piece});
        total += piece;
        quiet = std::abs(piece) < kTailTolerance * std::abs(total) ? quiet + 1 : 0;
        if (quiet >= 2) return;
        edge = next;
        width *= 2.0;
      }
      throw NormalizationFailure(std::string("Density1D: tail does not decay while computing ") + what +
                                 "; the integral appears to diverge");
    };
    expand(-1, left);
    expand(+1, right);
    if (!std::isfinite(total)) throw NormalizationFailure(std::string("Density1D: non-finite ") + what);

    if (record) {
      record->clear();
      for (auto it = left.rbegin(); it != left.rend(); ++it) record->push_back(*it);
      record->push_back({core_a, core_b, core});
      record->insert(record->end(), right.begin(), right.end());
    }
    return total;
  }

  void build_segments() {
    mass_ = integrate_expanding([&](double x) { return shifted(x); }, "the normalizer", &segments_);
    if (!(mass_ > 0.0) || !std::isfinite(mass_))
      throw NormalizationFailure("Density1D: normalizer is not positive and finite");
  }

  LogDensity log_density_;
  double lower_;
  double upper_;
  double center_ = 0.0;
  double scale_ = 1.0;
  double shift_ = 0.0;
  double mass_ = 0.0;
  std::vector<Segment> segments_;
};

}  // namespace bayesinv

#endif  // BAYESINV_DENSITY_HPP
