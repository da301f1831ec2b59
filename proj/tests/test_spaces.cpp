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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "spiralglue/spaces.hpp"

namespace sg = spiralglue;

namespace {

sg::Point RandomPoint(std::mt19937_64 &rng, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(d);
  for (auto &c : v) c = g(rng);
  return sg::Point(v);
}

TEST(Norms, HandComputedValues) {
  const sg::Point x{3.0, -4.0};
  EXPECT_DOUBLE_EQ(sg::norm(sg::Space::Lp(2, 1.0), x), 7.0);
  EXPECT_DOUBLE_EQ(sg::norm(sg::Space::Lp(2, 2.0), x), 5.0);
  EXPECT_DOUBLE_EQ(sg::norm(sg::Space::LInf(2), x), 4.0);
  EXPECT_NEAR(sg::norm(sg::Space::Lp(2, 1.5), sg::Point{1.0, 1.0}), 1.5874010519681994, 1e-15);
  EXPECT_NEAR(sg::norm(sg::Space::Lp(2, 4.0), sg::Point{1.0, 2.0}), 2.0305431848689306, 1e-15);
}

TEST(Norms, WeightedAndFunctionals) {
  const auto w = sg::Space::Make(2, sg::WeightedLpNorm{sg::LpExponent::Finite(2.0), {1.0, 3.0}});
  EXPECT_NEAR(sg::norm(w, sg::Point{1.0, 1.0}), 3.1622776601683795, 1e-15);
  const auto f = sg::Space::Make(2, sg::MaxAbsFunctionalsNorm{{{1.0, 0.0}, {1.0, 1.0}}});
  EXPECT_DOUBLE_EQ(sg::norm(f, sg::Point{1.0, -2.0}), 1.0);
  EXPECT_DOUBLE_EQ(sg::norm(f, sg::Point{2.0, 1.0}), 3.0);
}

TEST(Norms, NoOverflowForHugeCoordinates) {
  EXPECT_NEAR(sg::norm(sg::Space::Lp(2, 2.0), sg::Point{1e200, 1e200}) / 1e200,
              1.4142135623730951, 1e-15);
  EXPECT_NEAR(sg::norm(sg::Space::Lp(2, 3.0), sg::Point{1e300, 1e300}) / 1e300,
              1.2599210498948732, 1e-15);
}

TEST(Norms, DisjointSupportsAddExactlyInL1) {
  std::mt19937_64 rng(5);
  const auto s = sg::Space::Lp(4, 1.0);
  for (int k = 0; k < 200; ++k) {
    const auto a = RandomPoint(rng, 2, std::exp(10.0 * k / 200.0));
    const auto b = RandomPoint(rng, 2);
    const sg::Point joined{a[0], a[1], b[0], b[1]};
    EXPECT_EQ(sg::norm(s, joined), (std::abs(a[0]) + std::abs(a[1])) + std::abs(b[0]) + std::abs(b[1]));
  }
}

TEST(Norms, TriangleAndHomogeneity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-50.0, 50.0);
  for (const auto &space : {sg::Space::Lp(5, 1.0), sg::Space::Lp(5, 1.5), sg::Space::Lp(5, 2.0),
                            sg::Space::Lp(5, 4.0), sg::Space::LInf(5)}) {
    for (int k = 0; k < 300; ++k) {
      const auto x = RandomPoint(rng, 5);
      const auto y = RandomPoint(rng, 5);
      const double nx = sg::norm(space, x), ny = sg::norm(space, y);
      EXPECT_LE(sg::norm(space, x + y), (nx + ny) * (1.0 + 1e-14));
      const double l = lam(rng);
      EXPECT_NEAR(sg::norm(space, l * x), std::abs(l) * nx, 1e-13 * std::abs(l) * nx);
    }
  }
}

TEST(Space, RejectsBadInput) {
  EXPECT_THROW(sg::Space::Lp(0, 2.0), sg::Error);
  EXPECT_THROW(sg::Space::Lp(2, 0.5), sg::Error);
  EXPECT_THROW(sg::Space::Make(2, sg::WeightedLpNorm{sg::LpExponent::Finite(2.0), {1.0}}),
               sg::Error);
  EXPECT_THROW(sg::Space::Make(2, sg::WeightedLpNorm{sg::LpExponent::Finite(2.0), {1.0, 0.0}}),
               sg::Error);
  try {
    sg::Space::Make(2, sg::MaxAbsFunctionalsNorm{{{1.0, 1.0}, {2.0, 2.0}}});
    FAIL() << "rank-deficient functionals accepted";
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kInvalidArgument);
  }
  try {
    sg::norm(sg::Space::Lp(3, 2.0), sg::Point{1.0, 2.0});
    FAIL() << "dimension mismatch accepted";
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kDimensionMismatch);
  }
}

TEST(Point, RejectsNonFinite) {
  try {
    sg::Point p{1.0, std::numeric_limits<double>::quiet_NaN()};
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kNonFinite);
  }
  EXPECT_THROW((sg::Point{std::numeric_limits<double>::infinity()}), sg::Error);
}

TEST(LinearMap, ApplyAndCombine) {
  const auto s2 = sg::Space::Lp(2, 2.0);
  const auto s3 = sg::Space::Lp(3, 1.0);
  const auto e = sg::LinearMap::FromRows(s2, s3, {{1, 0}, {0, 1}, {1, 1}});
  const auto f = sg::LinearMap::FromRows(s2, s3, {{0, 2}, {1, 0}, {0, 0}});
  const sg::Point x{2.0, -1.0};
  const auto ex = sg::apply(e, x);
  EXPECT_EQ(ex, (sg::Point{2.0, -1.0, 1.0}));
  EXPECT_EQ(sg::apply(f, x), (sg::Point{-2.0, 2.0, 0.0}));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> th(0.0, 6.3);
  for (int k = 0; k < 100; ++k) {
    const double t = th(rng);
    const auto y = RandomPoint(rng, 2);
    const auto via_matrix = sg::apply(sg::combine(t, e, f), y);
    const auto via_images = sg::SpiralCombine(std::cos(t), sg::apply(e, y), std::sin(t), sg::apply(f, y));
    const double scale = std::max(1.0, sg::norm(s3, via_images));
    EXPECT_LE(sg::norm(s3, via_matrix - via_images), 1e-12 * scale);
  }
  EXPECT_THROW(sg::LinearMap::Make(s2, s3, {1.0, 2.0}), sg::Error);
  EXPECT_THROW(sg::apply(e, sg::Point{1.0, 2.0, 3.0}), sg::Error);
  EXPECT_THROW(sg::combine(0.1, e, sg::LinearMap::Identity(s2)), sg::Error);
}

TEST(LinearMap, Identity) {
  const auto s = sg::Space::Lp(3, 4.0);
  const sg::Point x{1.0, -2.0, 0.5};
  EXPECT_EQ(sg::apply(sg::LinearMap::Identity(s), x), x);
}

}  // namespace
