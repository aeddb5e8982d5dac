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


#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bayesinv/spectral.hpp"
#include "oracles.hpp"

namespace {

using namespace bayesinv;
using namespace bayesinv::spectral;

TEST(Spectral, RecoversOrnsteinUhlenbeck) {
  for (double b : {0.5, 1.0, 2.0}) {
    std::vector<double> tau;
    for (int i = 0; i <= 60; ++i) tau.push_back(0.05 * i);
    const std::vector<double> k = spectral_kernel(std::vector<double>{b * b, 1.0}, tau);
    double err = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) err = std::max(err, std::abs(k[i] - std::exp(-b * tau[i]) / (2 * b)));
    EXPECT_LT(err, 1e-4) << "b = " << b;
  }
}

TEST(Spectral, ValueAtZeroMatchesQuadrature) {
  for (const std::vector<double>& b : {std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 0.5, 0.1},
                                       std::vector<double>{0.3, 0.0, 1.0}}) {
    const PenaltyCoefficients c(b);
    // s = tan(u) maps (-pi/2, pi/2) onto the real line.
    const double want = oracle::simpson_pieces(
        [&](double u) {
          const double s = std::tan(u);
          const double j = 1.0 + s * s;
          return std::isfinite(s) ? c.power_spectrum(s) * j : 0.0;
        },
        -std::numbers::pi / 2, std::numbers::pi / 2, 64, 1e-13);
    const SpectralKernel k(c);
    EXPECT_NEAR(k(0.0), want, 1e-6 * want);
    EXPECT_NEAR(k(0.7), k(-0.7), 1e-14);
  }
}

TEST(Spectral, RejectsDegeneratePenalties) {
  EXPECT_THROW(SpectralKernel(PenaltyCoefficients({1.0})), InvalidParameter);
  EXPECT_THROW(PenaltyCoefficients({0.0, 1.0}), InvalidParameter);
  EXPECT_THROW(PenaltyCoefficients({1.0, -1.0}), InvalidParameter);
  EXPECT_THROW(PenaltyCoefficients({0.0, 0.0}), InvalidParameter);
  EXPECT_EQ(PenaltyCoefficients({1.0, 2.0, 0.0}).order(), 1u);
}

TEST(Spectral, PolynomialEvaluation) {
  const PenaltyCoefficients c({2.0, 3.0, 0.5});
  const double w = 4 * std::numbers::pi * std::numbers::pi * 0.3 * 0.3;
  EXPECT_NEAR(c.polynomial(0.3), 2.0 + 3.0 * w + 0.5 * w * w, 1e-12);
}

TEST(Stencils, CentralDifferences) {
  EXPECT_EQ(central_stencil(1), (std::vector<double>{-0.5, 0.0, 0.5}));
  EXPECT_EQ(central_stencil(2), (std::vector<double>{1.0, -2.0, 1.0}));
  EXPECT_EQ(central_stencil(4), (std::vector<double>{1.0, -4.0, 6.0, -4.0, 1.0}));
  EXPECT_THROW(difference_operator(3, 4), InvalidParameter);
}

TEST(PenaltyForm, FirstDerivativeOfSine) {
  const std::size_t n = 400;
  Eigen::VectorXd theta(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = std::sin(2 * std::numbers::pi * i / static_cast<double>(n));
  const double got = penalty_quadratic_form(n, std::vector<double>{0.0, 1.0}, theta);
  const double want = 2 * std::numbers::pi * std::numbers::pi;
  EXPECT_LT(std::abs(got - want) / want, 0.05);
  const double with_mass = penalty_quadratic_form(n, std::vector<double>{1.0, 1.0}, theta);
  EXPECT_LT(std::abs(with_mass - want - 0.5) / (want + 0.5), 0.05);
  EXPECT_THROW(penalty_quadratic_form(4, std::vector<double>{1.0, 0.0, 1.0}, Eigen::VectorXd::Zero(4)),
               InvalidParameter);
}

}  // namespace
