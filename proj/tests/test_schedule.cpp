// Copyright 2026-present the spiralglue project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "spiralglue/schedule.hpp"

namespace sg = spiralglue;

namespace {

constexpr double kPi = std::numbers::pi;

sg::Params P(double eps, double delta, double gamma = 0.01, double zeta = 0.01) {
  return {eps, delta, gamma, zeta};
}

TEST(Schedule, FrozenRadii) {
  const auto s = sg::build_schedule(P(0.5, 0.1), 1.0, 2, 0.0);
  EXPECT_NEAR(s.R(1), 23.1406926327793, 1e-12);
  EXPECT_NEAR(s.r(2), 231.406926327793, 1e-11);
  EXPECT_EQ(s.R(0), 0.0);
  EXPECT_NEAR(sg::build_schedule(P(0.2, 0.1), 1.0, 1).log_R(1), 7.85398163397448, 1e-13);
}

TEST(Schedule, CoverageAndGaps) {
  const auto p = P(0.01, 0.01);
  const auto s = sg::build_schedule(p, 2.0, 3, 0.01);
  EXPECT_EQ(s.levels(), 3u);
  for (std::size_t i = 1; i <= 3; ++i) {
    EXPECT_NEAR(s.log_R(i) - s.log_r(i), kPi / 0.02, 1e-9);
    EXPECT_NEAR(s.log_r(i + 1) - s.log_R(i), -std::log(0.01) + std::log1p(0.01), 1e-9);
  }
  EXPECT_EQ(s.log_coverage(), s.log_r(4));
  EXPECT_NEAR(s.log_r(1), std::log(2.0), 1e-15);
  // three levels at eps = 0.01 stay inside double range
  EXPECT_LT(s.log_coverage(), 709.0);
  EXPECT_NO_THROW(s.r(4));
}

TEST(Schedule, LinearRadiusOverflows) {
  const auto s = sg::build_schedule(P(0.001, 0.01), 1.0, 1);
  EXPECT_GT(s.log_R(1), 1000.0);
  try {
    (void)s.R(1);
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kOverflow);
  }
}

TEST(Schedule, RejectsInvalid) {
  EXPECT_THROW(sg::build_schedule(P(0.0, 0.1), 1.0, 1), sg::Error);
  EXPECT_THROW(sg::build_schedule(P(1.0, 0.1), 1.0, 1), sg::Error);
  EXPECT_THROW(sg::build_schedule(P(0.1, 0.1, 1.0), 1.0, 1), sg::Error);
  EXPECT_THROW(sg::build_schedule(P(0.1, 0.1), -1.0, 1), sg::Error);
  EXPECT_THROW(sg::build_schedule(P(0.1, 0.1), 1.0, 0), sg::Error);
  EXPECT_THROW(sg::build_schedule(P(0.1, 0.1), 1.0, 1, -0.5), sg::Error);
  // ramp too short for eps
  EXPECT_THROW(sg::RadiiSchedule::FromLogs(P(0.1, 0.1), {0.0}, {1.0}, 0.0), sg::Error);
  // R_1/delta above r_2
  EXPECT_THROW(sg::RadiiSchedule::FromLogs(P(0.5, 0.1), {0.0, 4.0}, {3.2, 8.0}, 0.0), sg::Error);
  EXPECT_NO_THROW(sg::RadiiSchedule::FromLogs(P(0.5, 0.1), {0.0, 3.2 - std::log(0.1)},
                                              {3.2, 9.0}, 0.0));
}

TEST(Weights, TauValues) {
  const sg::WeightSystem ws(sg::build_schedule(P(0.5, 0.1), 1.0, 1));
  EXPECT_EQ(ws.tau(1, 0.5), 0.0);
  EXPECT_EQ(ws.tau(1, 1.0), 0.0);
  EXPECT_NEAR(ws.tau(1, std::exp(kPi / 2.0)), kPi / 4.0, 1e-15);
  EXPECT_EQ(ws.TauLog(1, kPi), kPi / 2.0);
  EXPECT_EQ(ws.TauLog(1, 100.0), kPi / 2.0);
  const auto mid = ws.CoefficientsLog(1, kPi / 2.0);
  EXPECT_NEAR(mid.c, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(mid.s, std::sqrt(0.5), 1e-15);
  const auto lo = ws.CoefficientsLog(1, 0.0);
  EXPECT_EQ(lo.c, 1.0);
  EXPECT_EQ(lo.s, 0.0);
  const auto hi = ws.CoefficientsLog(1, kPi);
  EXPECT_EQ(hi.c, 0.0);
  EXPECT_EQ(hi.s, 1.0);
}

TEST(Weights, MuPiecewiseValues) {
  const sg::WeightSystem ws(sg::build_schedule(P(0.5, 0.1), 1.0, 2, 0.0));
  const auto &s = ws.schedule();
  // plateau of mu_1, ramp 1, plateau of mu_2, ramp 2, plateau of mu_3
  EXPECT_EQ(ws.AllMuLog(-1.0), (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(ws.MuLog(1, -std::numeric_limits<double>::infinity()), 1.0);
  const auto ramp1 = ws.AllMuLog(kPi / 3.0);
  EXPECT_NEAR(ramp1[0], std::cos(kPi / 6.0), 1e-15);
  EXPECT_NEAR(ramp1[1], std::sin(kPi / 6.0), 1e-15);
  EXPECT_EQ(ramp1[2], 0.0);
  EXPECT_EQ(ws.AllMuLog(0.5 * (s.log_R(1) + s.log_r(2))), (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(ws.AllMuLog(s.log_R(2)), (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_EQ(ws.AllMuLog(s.log_coverage()), (std::vector<double>{0.0, 0.0, 1.0}));
  try {
    ws.MuLog(1, s.log_coverage() + 1e-9);
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kOutOfScheduleRange);
  }
}

TEST(Weights, PartitionOfUnityRandom) {
  const sg::WeightSystem ws(sg::build_schedule(P(0.05, 0.05), 0.3, 3));
  const auto &s = ws.schedule();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lt(sg::DefaultGridStart(s), s.log_coverage());
  for (int k = 0; k < 5000; ++k) {
    double sq = 0.0;
    for (double m : ws.AllMuLog(lt(rng))) sq += m * m;
    EXPECT_NEAR(sq, 1.0, 1e-15);
  }
}

TEST(Weights, TauSlopeIsEpsOnTheRamp) {
  const sg::WeightSystem ws(sg::build_schedule(P(0.1, 0.1), 1.0, 1));
  const auto [left, right] = sg::OneSidedTauSlopes(ws, 1, 5.0);
  EXPECT_NEAR(left, 0.1, 1e-8);
  EXPECT_NEAR(right, 0.1, 1e-8);
  const auto [l0, r0] = sg::OneSidedTauSlopes(ws, 1, 0.0);
  EXPECT_NEAR(l0, 0.0, 1e-12);
  EXPECT_NEAR(r0, 0.1, 1e-8);
}

TEST(Weights, LawsHoldOnGrids) {
  for (double eps : {0.5, 0.1, 0.01}) {
    const sg::WeightSystem ws(sg::build_schedule(P(eps, 0.01), 1.0, 3));
    const auto rep = sg::check_weight_conditions(ws, 500);
    EXPECT_TRUE(rep.Passed()) << "eps " << eps;
    EXPECT_EQ(rep.support_violations, 0u);
    EXPECT_EQ(rep.plateau_violations, 0u);
    EXPECT_EQ(rep.monotonicity_violations, 0u);
    EXPECT_LE(rep.max_partition_error, 1e-15);
    EXPECT_LE(rep.max_speed_excess, 1e-6);
    EXPECT_GE(rep.min_tau_slope, -1e-9);
  }
}

}  // namespace
