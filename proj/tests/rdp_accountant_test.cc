// Copyright 2026 The dpgemb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpgemb/rdp_accountant.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "rdp_oracle.h"

namespace dpgemb {
namespace {

TEST(GaussianRdpTest, DirectSubstitution) {
  EXPECT_DOUBLE_EQ(*GaussianRdp(2, 1, 5), 0.04);
  EXPECT_DOUBLE_EQ(*GaussianRdp(2, 2, 5), 0.16);
  EXPECT_DOUBLE_EQ(*GaussianRdp(3, 1, 1), 1.5);
}

TEST(GaussianRdpTest, ZeroSigmaIsInfinite) {
  EXPECT_EQ(*GaussianRdp(2, 1, 0), std::numeric_limits<double>::infinity());
  EXPECT_FALSE(GaussianRdp(1.0, 1, 1).ok());
}

TEST(SubsampledRdpTest, ReferenceValues) {
  EXPECT_NEAR(*SubsampledGaussianRdp(2, 0.1, 1, 5), std::log1p(0.01 * 4.0 * std::expm1(0.04)),
              1e-15);
  EXPECT_NEAR(*SubsampledGaussianRdp(2, 0.1, 1, 5), 0.001631, 5e-7);
  // Full batch: log(1 + min{4 (e^0.04 - 1), 2 e^0.04}) = log(1.163243).
  EXPECT_NEAR(*SubsampledGaussianRdp(2, 1.0, 1, 5), std::log1p(4.0 * std::expm1(0.04)), 1e-15);
  EXPECT_NEAR(*SubsampledGaussianRdp(2, 1.0, 1, 5), 0.151212, 5e-7);
}

TEST(SubsampledRdpTest, VanishesAsGammaShrinks) {
  for (int a : {2, 8, 32, 64}) {
    const double tiny = *SubsampledGaussianRdp(a, 1e-12, 1, 5);
    EXPECT_GE(tiny, 0.0);
    EXPECT_LT(tiny, 1e-20);
  }
}

TEST(SubsampledRdpTest, MatchesExtendedPrecisionOracle) {
  for (double sigma : {1.0, 2.0, 5.0, 10.0}) {
    for (double gamma : {0.001, 0.00883, 0.01, 0.1, 0.5, 1.0}) {
      for (int a = 2; a <= 64; ++a) {
        const double got = *SubsampledGaussianRdp(a, gamma, 2.0, 2.0 * sigma);
        const long double want = testing::OracleSubsampledRdp(a, gamma, 2.0L, 2.0L * sigma);
        EXPECT_NEAR(got, static_cast<double>(want), 1e-9)
            << "alpha=" << a << " gamma=" << gamma << " sigma=" << sigma;
      }
    }
  }
}

TEST(SubsampledRdpTest, MonotoneInGammaSensitivityAndSigma) {
  for (int a : {2, 5, 17, 64}) {
    double prev = 0.0;
    for (double gamma : {0.001, 0.01, 0.05, 0.2, 0.7, 1.0}) {
      const double v = *SubsampledGaussianRdp(a, gamma, 1, 5);
      EXPECT_GE(v, prev);
      prev = v;
    }
    prev = 0.0;
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
      const double v = *SubsampledGaussianRdp(a, 0.05, s, 5);
      EXPECT_GE(v, prev);
      prev = v;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double sigma : {1.0, 2.0, 5.0, 10.0}) {
      const double v = *SubsampledGaussianRdp(a, 0.05, 1, sigma);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(SubsampledRdpTest, AmplificationBelowGaussian) {
  for (double sigma : {1.0, 5.0, 10.0}) {
    for (double gamma : {0.001, 0.01, 0.1}) {
      for (int a = 2; a <= 64; ++a) {
        EXPECT_LT(*SubsampledGaussianRdp(a, gamma, 1, sigma), *GaussianRdp(a, 1, sigma));
      }
    }
  }
}

TEST(SubsampledRdpTest, BoundIsLooserThanGaussianAtLargeRatios) {
  // The series carries a factor of 2 on every higher-order term, so for large
  // sampling ratios it exceeds the plain Gaussian bound; the accountant still
  // reports the series value.
  EXPECT_GT(*SubsampledGaussianRdp(2, 1.0, 1, 5), *GaussianRdp(2, 1, 5));
  EXPECT_GT(*SubsampledGaussianRdp(8, 0.5, 1, 5), *GaussianRdp(8, 1, 5));
}

TEST(SubsampledRdpTest, RejectsInvalidArguments) {
  EXPECT_FALSE(SubsampledGaussianRdp(2.5, 0.1, 1, 5).ok());
  EXPECT_FALSE(SubsampledGaussianRdp(1, 0.1, 1, 5).ok());
  EXPECT_FALSE(SubsampledGaussianRdp(2, 0.0, 1, 5).ok());
  EXPECT_FALSE(SubsampledGaussianRdp(2, 1.5, 1, 5).ok());
}

TEST(SubsampledRdpTest, LargeOrdersStayFinite) {
  // At sigma = 1 the top term of order 64 is about e^2000; the log-space sum
  // must still produce a finite value.
  const double v = *SubsampledGaussianRdp(64, 1.0, 1, 1);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, static_cast<double>(testing::OracleSubsampledRdp(64, 1.0L, 1.0L, 1.0L)), 1e-9);
}

TEST(RdpAccountantTest, ComposeIsLinearAndExact) {
  auto a = *RdpAccountant::Create(0.1, 1, 5);
  auto b = a;
  a.Compose(1);
  a.Compose(1);
  b.Compose(2);
  EXPECT_EQ(a.AccumulatedRdp(), b.AccumulatedRdp());

  auto c = *RdpAccountant::Create(0.013, 2, 5);
  auto d = c;
  for (int i = 0; i < 1000; ++i) c.Compose(1);
  d.Compose(600);
  d.Compose(400);
  EXPECT_EQ(c.AccumulatedRdp(), d.AccumulatedRdp());
}

TEST(RdpAccountantTest, ComposeZeroLeavesStateUnchanged) {
  auto a = *RdpAccountant::Create(0.1, 1, 5);
  a.Compose(3);
  const auto before = a.AccumulatedRdp();
  a.Compose(0);
  EXPECT_EQ(a.AccumulatedRdp(), before);
  EXPECT_EQ(a.steps(), 3u);
}

TEST(RdpAccountantTest, TwoHundredEpochsAtOrderTwo) {
  auto a = *RdpAccountant::Create(0.1, 1, 5, {2});
  a.Compose(200);
  const double want = 200.0 * static_cast<double>(testing::OracleSubsampledRdp(2, 0.1L, 1, 5));
  EXPECT_NEAR(a.AccumulatedRdp()[0], want, 1e-12);
  EXPECT_NEAR(a.AccumulatedRdp()[0], 0.3262, 5e-5);
}

TEST(RdpAccountantTest, AccumulationNondecreasingInSteps) {
  auto a = *RdpAccountant::Create(0.05, 2, 5);
  auto prev = a.AccumulatedRdp();
  for (int t = 0; t < 20; ++t) {
    a.Compose(1);
    const auto now = a.AccumulatedRdp();
    for (std::size_t i = 0; i < now.size(); ++i) EXPECT_GE(now[i], prev[i]);
    prev = now;
  }
}

TEST(RdpAccountantTest, ReleasesPerStepMultiplies) {
  auto one = *RdpAccountant::Create(0.05, 2, 5);
  auto two = *RdpAccountant::Create(0.05, 2, 5, DefaultRdpOrders(), 2);
  one.Compose(10);
  two.Compose(10);
  for (std::size_t i = 0; i < one.orders().size(); ++i) {
    EXPECT_DOUBLE_EQ(two.AccumulatedRdp()[i], 2.0 * one.AccumulatedRdp()[i]);
  }
}

TEST(ToDpTest, SingleOrderSubstitution) {
  // At gamma = 1/2, S = 1, sigma = 5 the order-2 bound is
  // log(1 + 0.25 * 4 (e^0.04 - 1)) = 0.04 exactly.
  auto a = *RdpAccountant::Create(0.5, 1, 5, {2});
  a.Compose(1);
  EXPECT_NEAR(a.AccumulatedRdp()[0], 0.04, 1e-15);
  auto dp = a.ToDp(1e-5);
  ASSERT_TRUE(dp.ok());
  EXPECT_EQ(dp->alpha, 2);
  EXPECT_NEAR(dp->epsilon, 0.04 + std::log(1e5), 1e-12);
  EXPECT_NEAR(dp->epsilon, 11.5529, 5e-5);
}

TEST(ToDpTest, ZeroAccumulationPicksLargestOrder) {
  auto a = *RdpAccountant::Create(0.1, 1, 5, {2, 64});
  auto dp = a.ToDp(1e-5);
  ASSERT_TRUE(dp.ok());
  EXPECT_EQ(dp->alpha, 64);
  EXPECT_NEAR(dp->epsilon, std::log(1e5) / 63.0, 1e-12);
}

TEST(ToDpTest, MatchesFullGridOracle) {
  auto a = *RdpAccountant::Create(0.1, 1, 5);
  a.Compose(200);
  long double best = std::numeric_limits<long double>::infinity();
  int best_alpha = 0;
  for (int alpha = 2; alpha <= 64; ++alpha) {
    const long double v = 200.0L * testing::OracleSubsampledRdp(alpha, 0.1L, 1, 5) +
                          std::log(1e5L) / (alpha - 1);
    if (v < best) {
      best = v;
      best_alpha = alpha;
    }
  }
  auto dp = a.ToDp(1e-5);
  ASSERT_TRUE(dp.ok());
  EXPECT_NEAR(dp->epsilon, static_cast<double>(best), 1e-9);
  EXPECT_EQ(dp->alpha, best_alpha);
}

TEST(ToDpTest, RejectsDeltaOutsideUnitInterval) {
  auto a = *RdpAccountant::Create(0.1, 1, 5);
  EXPECT_FALSE(a.ToDp(0.0).ok());
  EXPECT_FALSE(a.ToDp(1.0).ok());
}

TEST(DeltaSpentTest, ZeroAccumulationSingleOrder) {
  auto a = *RdpAccountant::Create(0.1, 1, 5, {2});
  EXPECT_NEAR(*a.DeltaSpent(3.5), std::exp(-3.5), 1e-15);
  EXPECT_NEAR(*a.DeltaSpent(3.5), 0.03020, 5e-6);
}

TEST(DeltaSpentTest, ExhaustedBudgetIsOne) {
  auto a = *RdpAccountant::Create(1.0, 2, 1, {2});
  a.Compose(10);  // 10 * per-step bound far above 0.5
  EXPECT_EQ(*a.DeltaSpent(0.5), 1.0);
  EXPECT_FALSE(a.DeltaSpent(0.0).ok());
}

TEST(DeltaSpentTest, ConsistentWithToDp) {
  for (double gamma : {0.001, 0.01, 0.1}) {
    for (std::uint64_t steps : {1u, 50u, 500u}) {
      auto a = *RdpAccountant::Create(gamma, 2, 10);
      a.Compose(steps);
      for (double delta : {1e-5, 1e-3}) {
        const double eps = a.ToDp(delta)->epsilon;
        EXPECT_LE(*a.DeltaSpent(eps), delta + 1e-12);
      }
    }
  }
}

TEST(StoppingOracleTest, DefaultOperatingPointStopsWithinBudget) {
  const std::uint64_t stop = testing::OracleStoppingEpoch(128.0L / 14496.0L, 2, 5, 3.5, 1e-5, 100000);
  ASSERT_GT(stop, 0u);
  auto a = *RdpAccountant::Create(128.0 / 14496.0, 2, 5);
  a.Compose(stop - 1);
  EXPECT_LT(*a.DeltaSpent(3.5), 1e-5);
  a.Compose(1);
  EXPECT_GE(*a.DeltaSpent(3.5), 1e-5);
}

}  // namespace
}  // namespace dpgemb
