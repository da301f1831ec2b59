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

#include "spiralglue/bank.hpp"

namespace sg = spiralglue;

namespace {

std::vector<sg::Point> UnitVectors(const sg::Space &s, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<sg::Point> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(s.dim());
    for (auto &c : v) c = g(rng);
    const double nv = s.Norm(v);
    for (auto &c : v) c /= nv;
    out.emplace_back(v);
  }
  return out;
}

sg::EmbeddingBank ScalarBank(const std::vector<double> &values) {
  const auto s = sg::Space::Lp(1, 2.0);
  sg::EmbeddingBank b;
  for (double v : values) b.maps.push_back(sg::LinearMap::Make(s, s, {v}));
  return b;
}

sg::AnnulusDecomposition ScalarLevels(std::size_t m, double angle) {
  sg::AnnulusDecomposition d;
  for (std::size_t i = 1; i <= m; ++i) d.levels.push_back({i, {}, {{sg::Point{1.0}, {angle}}}});
  return d;
}

TEST(Bank, BlockShiftIsometriesAndBudget) {
  const auto src = sg::Space::Lp(3, 1.0);
  const auto dst = sg::Space::Lp(18, 1.0);
  const auto bank = sg::build_bank(sg::BlockShift{}, src, dst, 0.01, 6, UnitVectors(src, 50, 1));
  ASSERT_EQ(bank.size(), 6u);
  for (std::size_t n = 0; n < 6; ++n) {
    EXPECT_DOUBLE_EQ(bank.certificates[n].min_ratio, 1.0);
    EXPECT_DOUBLE_EQ(bank.certificates[n].max_ratio, 1.0);
    EXPECT_DOUBLE_EQ(bank.eps_n[n], std::expm1(std::log1p(0.01) / 6.0));
  }
  EXPECT_NEAR(bank.BudgetProduct(), 1.01, 1e-15);
  EXPECT_EQ(sg::apply(bank.maps[2], sg::Point{1.0, 2.0, 3.0})[6], 1.0);
  EXPECT_EQ(bank.certified_vectors, 50u);
  EXPECT_THROW(sg::build_bank(sg::BlockShift{}, src, sg::Space::Lp(17, 1.0), 0.01, 6, UnitVectors(src, 5, 1)),
               sg::Error);
  EXPECT_THROW(sg::build_bank(sg::BlockShift{2}, src, dst, 0.01, 6, UnitVectors(src, 5, 1)), sg::Error);
  EXPECT_THROW(sg::build_bank(sg::BlockShift{}, src, dst, 0.01, 1, UnitVectors(src, 5, 1)), sg::Error);
}

TEST(Bank, QuadratureIsCertified) {
  const auto src = sg::Space::Lp(2, 2.0);
  const auto dst = sg::Space::Lp(8 * 64, 1.0);
  const auto probes = UnitVectors(src, 500, 3);
  const auto bank = sg::build_bank(sg::QuadratureL2toL1{64, 5}, src, dst, 0.01, 8, probes);
  for (std::size_t n = 0; n < bank.size(); ++n) {
    EXPECT_GE(bank.certificates[n].min_ratio, 1.0 - 1e-12);
    EXPECT_LE(bank.certificates[n].max_ratio, 1.0 + bank.eps_n[n] + 1e-12);
  }
  // equispaced directions: max/min of sum |cos| is 1/cos(pi/(2K)) at most
  for (const auto &u : UnitVectors(src, 200, 9)) {
    const double r = sg::norm(dst, sg::apply(bank.maps[0], u));
    EXPECT_GE(r, 1.0 - 1e-12);
    EXPECT_LE(r, 1.0 / std::cos(std::numbers::pi / 128.0) + 1e-12);
  }
  EXPECT_THROW(sg::build_bank(sg::QuadratureL2toL1{64, 5}, sg::Space::Lp(2, 1.0), dst, 0.01, 8, probes),
               sg::Error);
}

TEST(Bank, CertificationFailureNamesTheMap) {
  const auto s = sg::Space::Lp(2, 2.0);
  sg::UserMatrices um{{{1, 0, 0, 1}, {2, 0, 0, 2}}};
  try {
    sg::build_bank(um, s, s, 0.01, 0, {sg::Point{1.0, 0.0}});
    FAIL();
  } catch (const sg::CertificationFailed &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kCertificationFailed);
    EXPECT_EQ(e.map_index(), 1u);
    EXPECT_DOUBLE_EQ(e.ratio(), 2.0);
    EXPECT_EQ(e.worst_vector(), (sg::Point{1.0, 0.0}));
  }
  // contraction is caught on the lower side
  sg::UserMatrices shrink{{{1, 0, 0, 1}, {1, 0, 0, 0.5}}};
  try {
    sg::build_bank(shrink, s, s, 0.01, 0, {sg::Point{1.0, 0.0}, sg::Point{0.0, 1.0}});
    FAIL();
  } catch (const sg::CertificationFailed &e) {
    EXPECT_EQ(e.map_index(), 1u);
    EXPECT_DOUBLE_EQ(e.ratio(), 0.5);
  }
  EXPECT_THROW(sg::build_bank(um, s, s, 0.01, 3, {sg::Point{1.0, 0.0}}), sg::Error);
  EXPECT_THROW(sg::build_bank(sg::UserMatrices{{{1, 0, 0, 1}, {1, 0, 0, 1}}}, s, s, 0.01, 0, {}),
               sg::Error);
}

TEST(Spreading, BlockShiftClosedForm) {
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const auto src = sg::Space::Lp(2, p);
    const auto dst = sg::Space::Lp(16, p);
    const auto bank = sg::build_bank(sg::BlockShift{}, src, dst, 0.01, 8, UnitVectors(src, 20, 2));
    const sg::Point u = (1.0 / sg::norm(src, sg::Point{1.0, 2.0})) * sg::Point{1.0, 2.0};
    for (double t : {0.0, 0.3, std::numbers::pi / 4.0, 1.2}) {
      const double c = std::cos(t), s = std::sin(t);
      const auto est = sg::spreading_limit_estimate(bank, u, {c, s}, 1e-12, 4);
      EXPECT_NEAR(est.value, std::pow(std::pow(c, p) + std::pow(s, p), 1.0 / p), 1e-14);
      EXPECT_EQ(est.start, 0u);
      EXPECT_LE(est.oscillation, 1e-12);
    }
  }
  const auto e = sg::spreading_limit_estimate(
      sg::build_bank(sg::BlockShift{}, sg::Space::Lp(2, 1.0), sg::Space::Lp(16, 1.0), 0.01, 8,
                     {sg::Point{1.0, 0.0}}),
      sg::Point{1.0, 0.0}, {1.0, 1.0}, 1e-12, 4);
  EXPECT_DOUBLE_EQ(e.value, 2.0);
}

TEST(Spreading, StabilizesAfterAPrefix) {
  // the first map differs from the identity tail
  const auto bank = ScalarBank({-1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  const auto est = sg::spreading_limit_estimate(bank, sg::Point{1.0}, {1.0, 1.0}, 1e-12, 4);
  EXPECT_EQ(est.start, 1u);
  EXPECT_DOUBLE_EQ(est.value, 2.0);
}

TEST(Spreading, ReportsNotStabilized) {
  const auto bank = ScalarBank({1.0, -1.0, 1.0, -1.0, 1.0, -1.0});
  try {
    sg::spreading_limit_estimate(bank, sg::Point{1.0}, {1.0, 1.0}, 1e-9, 2);
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kNotStabilized);
  }
  EXPECT_THROW(sg::spreading_limit_estimate(bank, sg::Point{1.0}, {0.0, 0.0}, 1e-9, 2), sg::Error);
}

TEST(Selection, Threshold) {
  EXPECT_NEAR(sg::SelectionThreshold(0.01), 0.46673714929805116, 1e-16);
  EXPECT_NEAR(sg::SelectionThreshold(1e-300), 0.4714045207910317, 1e-16);
}

TEST(Selection, FirstFitOnAGoodBank) {
  const auto sel = sg::select_subsequence(ScalarBank({1, 1, 1, 1, 1}), ScalarLevels(3, 0.7), 0.01);
  EXPECT_EQ(sel.chosen, (std::vector<std::size_t>{0, 1, 2, 3}));
  ASSERT_EQ(sel.levels.size(), 3u);
  EXPECT_NEAR(sel.levels[0].worst_norm, std::cos(0.7) + std::sin(0.7), 1e-15);
  EXPECT_EQ(sel.levels[0].checks, 1u);
}

TEST(Selection, BacktracksOutOfADeadEnd) {
  // (0,1) passes but 1 has no partner; (0,2) and (2,3) pass
  const auto sel = sg::select_subsequence(ScalarBank({3, 1, -1, -1}),
                                          ScalarLevels(2, std::numbers::pi / 4.0), 0.01);
  EXPECT_EQ(sel.chosen, (std::vector<std::size_t>{0, 2, 3}));
  for (const auto &lm : sel.levels) EXPECT_GE(lm.worst_norm, sel.threshold);
}

TEST(Selection, ExhaustedBankNamesTheWitness) {
  try {
    sg::select_subsequence(ScalarBank({1, -1}), ScalarLevels(1, std::numbers::pi / 4.0), 0.01);
    FAIL();
  } catch (const sg::BankExhausted &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kBankExhausted);
    EXPECT_EQ(e.level(), 1u);
    ASSERT_TRUE(e.worst_u().has_value());
    EXPECT_EQ(*e.worst_u(), sg::Point{1.0});
    EXPECT_DOUBLE_EQ(e.angle(), std::numbers::pi / 4.0);
    EXPECT_LT(e.achieved(), 1e-15);
  }
  // an empty U_i accepts any pair
  sg::AnnulusDecomposition empty;
  empty.levels.push_back({1, {}, {}});
  EXPECT_EQ(sg::select_subsequence(ScalarBank({1, -1}), empty, 0.01).chosen,
            (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(sg::select_subsequence(ScalarBank({1}), empty, 0.01), sg::Error);
}

}  // namespace
