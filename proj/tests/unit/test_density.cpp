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
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "bayesinv/density.hpp"
#include "oracles.hpp"

namespace {

using bayesinv::Density1D;
using bayesinv::NormalizationFailure;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Density1D, StandardNormal) {
  const Density1D d([](double x) { return -0.5 * x * x; }, -kInf, kInf, {0.3, 2.0});
  EXPECT_NEAR(d.normalizer(), std::sqrt(2 * std::numbers::pi), 1e-10);
  EXPECT_NEAR(d.mean(), 0.0, 1e-10);
  EXPECT_NEAR(d.variance(), 1.0, 1e-9);
  EXPECT_NEAR(d.cdf(0.0), 0.5, 1e-10);
  EXPECT_NEAR(d.cdf(1.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-10);
  EXPECT_NEAR(d.quantile(0.975), 1.959963984540054, 1e-8);
  EXPECT_NEAR(d.pdf(1.0), std::exp(-0.5) / std::sqrt(2 * std::numbers::pi), 1e-12);
}

TEST(Density1D, ShiftedHugeLogValues) {
  // exp(1e4 - (x - 50)^2 / 8) overflows unless the maximum is factored out.
  const Density1D d([](double x) { return 1e4 - (x - 50.0) * (x - 50.0) / 8.0; }, -kInf, kInf, {40.0, 1.0});
  EXPECT_NEAR(d.log_normalizer(), 1e4 + 0.5 * std::log(8.0 * std::numbers::pi), 1e-8);
  EXPECT_NEAR(d.mean(), 50.0, 1e-8);
  EXPECT_NEAR(d.sd(), 2.0, 1e-8);
}

TEST(Density1D, HalfLineAndBoundedSupport) {
  const Density1D e([](double x) { return -2.0 * x; }, 0.0, kInf, {0.5, 0.5});
  EXPECT_NEAR(e.normalizer(), 0.5, 1e-10);
  EXPECT_NEAR(e.mean(), 0.5, 1e-10);
  EXPECT_NEAR(e.quantile(0.5), std::log(2.0) / 2.0, 1e-9);
  EXPECT_EQ(e.pdf(-1.0), 0.0);

  // Beta(3, 2) kernel on [0, 1].
  const Density1D b([](double x) { return 2.0 * std::log(x) + std::log1p(-x); }, 0.0, 1.0, {0.6, 0.2});
  EXPECT_NEAR(b.normalizer(), 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(b.mean(), 0.6, 1e-10);
  EXPECT_NEAR(b.variance(), 0.04, 1e-10);
}

TEST(Density1D, NormalizedIntegralIsOne) {
  const Density1D t([](double x) { return -2.5 * std::log1p(x * x / 4.0); }, -kInf, kInf, {0.0, 1.0});
  const double mass = oracle::simpson([&](double u) {
    const double x = std::tan(u);
    return std::isfinite(x) ? t.pdf(x) * (1.0 + x * x) : 0.0;
  }, -std::numbers::pi / 2, std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_NEAR(t.cdf(t.quantile(0.9)), 0.9, 1e-9);
}

TEST(Density1D, NonIntegrableTailsThrow) {
  EXPECT_THROW(Density1D([](double) { return 0.0; }, -kInf, kInf, {0.0, 1.0}), NormalizationFailure);
  EXPECT_THROW(Density1D([](double x) { return -std::log1p(std::abs(x)); }, -kInf, kInf, {0.0, 1.0}),
               NormalizationFailure);
  EXPECT_THROW(Density1D([](double) { return -std::numeric_limits<double>::infinity(); }, 0.0, 1.0, {0.5, 0.1}),
               NormalizationFailure);
}

}  // namespace
