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


// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <boost/math/distributions/students_t.hpp>

#include "bayesinv/bayesinv.hpp"
#include "oracles.hpp"

namespace {

using namespace bayesinv;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd sine_on(const Grid& g) {
  return (2.0 * std::numbers::pi * g.nodes().array()).sin().matrix();
}

// posterior mean vs an iterative minimizer of the Tikhonov objective.
Outcome map_estimate() {
  const std::size_t n = 100;
  const Grid g(0.0, 1.0, n);
  const forward::ForwardOperator op = forward::make_gaussian_blur(g, 0.05);
  const Eigen::VectorXd y = forward::simulate_data(op, sine_on(g), 0.05, 1);
  const double nn = static_cast<double>(n);
  const std::vector<priors::Jump> jumps{{n / 2, 0.1}};
  const std::vector<priors::PrecisionRoot> roots{
      priors::build_smooth_zero_boundary(n, 10.0 / (nn * nn)), priors::build_smooth_soft_boundary(n, 10.0 / (nn * nn)),
      priors::build_nonsmooth(n, 3.0 / nn), priors::build_jump(n, jumps, 3.0 / nn)};
  double worst = 0.0;
  double slowest = 0.0;
  for (const auto& root : roots) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto post = posterior::fit(op, root, y, 0.05);
    slowest = std::max(slowest, seconds_since(t0));
    const Eigen::VectorXd want = oracle::minimize_tikhonov(op.matrix(), root.matrix(), y, 0.05, root.tilde_sigma());
    worst = std::max(worst, oracle::relative_sup(post.mean(), want));
  }
  return {worst < 1e-6 && slowest < 5.0, fmt("max rel sup %.2e, slowest fit %.3f s", worst, slowest)};
}

Outcome posterior_covariance() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 30;
  const Grid g(0.0, 1.0, n);
  const forward::ForwardOperator op = forward::make_gaussian_blur(g, 0.05);
  const Eigen::VectorXd y = forward::simulate_data(op, sine_on(g), 0.05, 1);
  const auto post = posterior::fit(op, priors::build_nonsmooth(n, 0.1), y, 0.05);
  const Eigen::MatrixXd cov = posterior::posterior_covariance(post);
  const double resid = (post.hessian() * cov - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff();
  const Eigen::Index k = 100000;
  const Eigen::MatrixXd draws = posterior::sample(post, k, 123);
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Eigen::VectorXd var =
      (draws.rowwise() - mean).colwise().squaredNorm().transpose() / static_cast<double>(k - 1);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 30; ++i) worst = std::max(worst, std::abs(var(i) - cov(i, i)) / cov(i, i));
  const double t = seconds_since(t0);
  return {resid < 1e-8 && worst < 0.03 && t < 30.0,
          fmt("|H Cov - I|max %.2e, max rel variance error %.4f, %.2f s", resid, worst, t)};
}

Outcome gp_linear_bridge() {
  const std::size_t n = 50;
  const Grid g(0.0, 1.0, n);
  const double sigma = 0.1;
  const priors::PrecisionRoot root = priors::build_smooth_zero_boundary(n, 0.01);
  const Eigen::VectorXd y = forward::simulate_data(forward::make_identity(g), sine_on(g), sigma, 6);
  const auto post = posterior::fit(forward::make_identity(g), root, y, sigma);
  const double s2 = root.tilde_sigma() * root.tilde_sigma();
  const Eigen::MatrixXd cov = s2 * root.gram().inverse();
  const gp::GPRegressionFit fit = gp::gp_fit(g.nodes(), y, gp::tabulated_on_grid(g, cov, "fd_prior"), sigma);
  Eigen::VectorXd mean(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < mean.size(); ++i) mean(i) = gp::gp_predict(fit, g.node(static_cast<std::size_t>(i))).mean;
  const double gap = oracle::sup_norm(mean - post.mean()) / std::max(1.0, oracle::sup_norm(post.mean()));
  return {gap < 1e-8, fmt("relative sup gap %.2e", gap)};
}

Outcome representer() {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(15), y(15);
  for (Eigen::Index i = 0; i < 15; ++i) {
    x(i) = unif(rng);
    y(i) = std::sin(6 * x(i));
  }
  double worst = 0.0;
  for (const gp::CovarianceKernel& k :
       {gp::ornstein_uhlenbeck(1.0), gp::squared_exponential(0.25), spline::spline_covariance_kernel(2)}) {
    const gp::GPRegressionFit fit = gp::gp_fit(x, y, k, 0.1);
    for (int t = 0; t < 100; ++t) {
      const double xs = unif(rng);
      worst = std::max(worst, std::abs(gp::gp_predict(fit, xs).mean - gp::representer_mean(fit, xs)));
    }
  }
  return {worst < 1e-12, fmt("max |predict - representer| %.2e over ou, se, spline", worst)};
}

Outcome nystrom() {
  const auto t0 = std::chrono::steady_clock::now();
  const gp::NystromResult r = gp::nystrom_eigen(gp::brownian_motion(), 1000, 5, 0, gp::Sampling::Midpoint);
  const double t = seconds_since(t0);
  double worst = 0.0;
  for (int j = 1; j <= 5; ++j) {
    const double lambda = 1.0 / (std::pow(j - 0.5, 2) * std::numbers::pi * std::numbers::pi);
    worst = std::max(worst, std::abs(r.pairs[static_cast<std::size_t>(j - 1)].lambda_hat - lambda) / lambda);
  }
  return {worst < 0.02 && t < 10.0, fmt("max rel eigenvalue error %.2e, %.2f s", worst, t)};
}

Outcome spectral_inversion() {
  double worst = 0.0;
  for (double b : {0.5, 1.0, 2.0}) {
    std::vector<double> tau;
    for (int i = 0; i <= 60; ++i) tau.push_back(0.05 * i);
    const std::vector<double> k = spectral::spectral_kernel(std::vector<double>{b * b, 1.0}, tau);
    for (std::size_t i = 0; i < tau.size(); ++i)
      worst = std::max(worst, std::abs(k[i] - std::exp(-b * tau[i]) / (2 * b)));
  }
  return {worst < 1e-4, fmt("max abs error vs exp(-b tau)/(2b) %.2e", worst)};
}

struct Sample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

Sample spline_data(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> xs(10);
  for (auto& v : xs) v = unif(rng);
  std::sort(xs.begin(), xs.end());
  Sample d{Eigen::Map<Eigen::VectorXd>(xs.data(), 10), Eigen::VectorXd(10)};
  for (int i = 0; i < 10; ++i) d.y(i) = std::sin(5.0 * d.x(i)) + noise(rng);
  return d;
}

// Least squares plus tau int f''^2 over the truncated-power cubic basis.
Eigen::VectorXd basis_minimizer(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double tau) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd b(n, n + 2);
  Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(n + 2, n + 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i, 0) = 1.0;
    b(i, 1) = x(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      b(i, 2 + j) = std::pow(std::max(x(i) - x(j), 0.0), 3);
      pen(2 + i, 2 + j) =
          36.0 * oracle::simpson([&](double u) { return (u - x(i)) * (u - x(j)); }, std::max(x(i), x(j)), 1.0, 1e-15);
    }
  }
  const Eigen::MatrixXd normal = oracle::matmul(b.transpose(), b) + tau * pen;
  return oracle::matvec(b, Eigen::FullPivLU<Eigen::MatrixXd>(normal).solve(oracle::matvec_transpose(b, y)));
}

Outcome smoothing_spline() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> pts(20);
  for (auto& v : pts) v = unif(rng);
  double kernel_gap = 0.0;
  for (double a : pts)
    for (double b : pts) kernel_gap = std::max(kernel_gap, std::abs(spline::integrated_wiener_cov(1, a, b) - spline::spline_kernel(a, b)));

  double fit_gap = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u})
    for (double tau : {1e-4, 1e-2}) {
      const Sample d = spline_data(seed);
      const spline::SplineFit fit = spline::spline_fit(d.x, d.y, 0.01, 0.01 / tau);
      const Eigen::VectorXd want = basis_minimizer(d.x, d.y, tau);
      for (Eigen::Index i = 0; i < 10; ++i) fit_gap = std::max(fit_gap, std::abs(spline::spline_predict(fit, d.x(i)) - want(i)));
    }

  const Sample d = spline_data(5);
  const spline::SplineFit fit = spline::spline_fit(d.x, d.y, 0.01, 10.0);
  const double scale = d.y.cwiseAbs().maxCoeff();
  auto f = [&](double v) { return spline::spline_predict(fit, v); };
  const double tail = (1.0 - d.x(9)) / 2;
  const double linear = std::max(std::abs(f(0.0) - 2 * f(d.x(0) / 2) + f(d.x(0))),
                                 std::abs(f(d.x(9)) - 2 * f(d.x(9) + tail) + f(1.0))) / scale;
  double fourth = 0.0;
  for (Eigen::Index k = 0; k + 1 < 10; ++k) {
    const double h = (d.x(k + 1) - d.x(k)) / 5;
    const double w[5] = {1, -4, 6, -4, 1};
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w[i] * f(d.x(k) + (i + 0.5) * h);
    fourth = std::max(fourth, std::abs(s) / scale);
  }
  std::ostringstream os;
  os << fmt("kernel gap %.1e, basis gap %.1e, ", kernel_gap, fit_gap)
     << fmt("tail curvature %.1e, fourth difference %.1e", linear, fourth);
  return {kernel_gap < 1e-10 && fit_gap < 1e-6 && linear < 1e-8 && fourth < 1e-6, os.str()};
}

Outcome hoadley() {
  double mean_gap = 0.0;
  double quantile_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    monte_carlo::CalibrationSimConfig cfg;
    cfg.n = 15;
    cfg.beta = 1.0;
    cfg.sigma = 0.5;
    cfg.x_tilde = 0.3;
    Rng rng = make_rng(500 + seed);
    const calibration::CalibrationData data = monte_carlo::simulate_calibration(cfg, rng);
    const calibration::CalibrationEstimates e = calibration::fit_calibration(data);
    const Density1D post = calibration::hoadley_posterior(data, calibration::hoadley_informative_prior(e));
    const calibration::TPosterior t = calibration::hoadley_t_posterior(e);
    const boost::math::students_t dist(t.df);
    mean_gap = std::max(mean_gap, std::abs(post.mean() - e.x_inverse));
    for (double p : {0.025, 0.25, 0.5, 0.75, 0.975})
      quantile_gap = std::max(quantile_gap, std::abs(post.quantile(p) - (t.location + t.scale * boost::math::quantile(dist, p))));
  }
  return {mean_gap < 1e-6 && quantile_gap < 1e-4, fmt("max mean gap %.2e, max quantile gap %.2e", mean_gap, quantile_gap)};
}

Outcome coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  monte_carlo::CalibrationSimConfig cfg = monte_carlo::coverage_defaults();
  cfg.replications = 10000;
  const auto s = monte_carlo::summarize_coverage(monte_carlo::run_replications(cfg, 1));
  const double t = seconds_since(t0);
  return {s.coverage >= 0.94 && s.coverage <= 0.96 && t < 60.0, fmt("coverage %.4f, %.2f s", s.coverage, t)};
}

Outcome poisson_inconsistency() {
  const std::vector<std::size_t> ns{100, 1000, 10000, 100000};
  double min_ratio = std::numeric_limits<double>::infinity();
  double worst_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rows = poisson::inconsistency_experiment(1.0, ns, seed);
    min_ratio = std::min(min_ratio, rows.back().sd_closed / rows.front().sd_closed);
    for (const auto& r : rows) worst_gap = std::max(worst_gap, std::abs(r.sd_quadrature - r.sd_closed) / r.sd_closed);
  }
  return {min_ratio >= 0.5 && worst_gap < 1e-8,
          fmt("min sd(1e5)/sd(1e2) %.3f, max rel quadrature gap %.2e", min_ratio, worst_gap)};
}

Outcome risk() {
  monte_carlo::CalibrationSimConfig cfg = monte_carlo::risk_defaults();
  cfg.replications = 10000;
  const auto s = monte_carlo::summarize_risk(monte_carlo::run_replications(cfg, 1), cfg.x_tilde);
  const double change = std::abs(s.mse_inverse_full - s.mse_inverse_half) / s.mse_inverse_half;
  const double spread = s.max_abs_classical / s.median_abs_classical;
  return {change <= 0.2 && spread > 100.0, fmt("MSE_I change %.3f, max/median |x_C| %.1f", change, spread)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "map_matches_tikhonov_minimizer", map_estimate},
      {2, "posterior_covariance_and_sampling", posterior_covariance},
      {3, "gp_on_grid_equals_linear_posterior", gp_linear_bridge},
      {4, "representer_identity", representer},
      {5, "nystrom_brownian_eigenvalues", nystrom},
      {6, "spectral_kernel_recovers_ou", spectral_inversion},
      {7, "smoothing_spline_equivalence", smoothing_spline},
      {8, "hoadley_posterior_t_form", hoadley},
      {9, "confidence_set_coverage", coverage},
      {10, "poisson_posterior_does_not_contract", poisson_inconsistency},
      {11, "calibration_risk_behaviour", risk},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    std::printf("[%s] %d %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), t, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
