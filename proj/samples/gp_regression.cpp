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


// GP regression with three kernels on the same noisy data. The cubic spline
// kernel is the one whose mean is a natural smoothing spline.

#include <cmath>
#include <cstdio>
#include <random>

#include "bayesinv/bayesinv.hpp"

int main() {
  using namespace bayesinv;
  Rng rng = make_rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Eigen::VectorXd x(25), y(25);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = unif(rng);
    y(i) = std::sin(6.0 * x(i)) + noise(rng);
  }
  for (const gp::CovarianceKernel& k :
       {gp::ornstein_uhlenbeck(2.0), gp::squared_exponential(0.2), spline::spline_covariance_kernel(2).scaled(50.0)}) {
    const gp::GPRegressionFit fit = gp::gp_fit(x, y, k, 0.1);
    std::printf("%s\n", k.name().c_str());
    for (double xs : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const gp::GpPrediction p = gp::gp_predict(fit, xs);
      std::printf("  f(%.1f) = %+.4f +- %.4f   (truth %+.4f)\n", xs, p.mean, std::sqrt(p.variance), std::sin(6.0 * xs));
    }
  }
}
