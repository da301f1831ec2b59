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
#pragma once

/**
 * @file pointset.hpp
 *
 * @brief Finite point sets, the annulus decomposition
 * M_i = { x : R_{i-1} < |x| <= r_{i+1} } u {0}, the difference directions U_i
 * with their angle sets T_i(u), and the same-level / far pair dichotomy.
 *
 * Region tests compare ln|x| against the log-domain radii.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "schedule.hpp"
#include "spaces.hpp"

namespace spiralglue {

struct LabeledPoint {
  std::int64_t id;
  Point point;
};

//! Id used for the origin adjoined to every M_i when the input lacks it.
inline constexpr std::int64_t kSyntheticOriginId = -1;

class LocallyFiniteSet {
 public:
  static LocallyFiniteSet Make(Space space, std::vector<LabeledPoint> points) {
    std::set<std::int64_t> ids;
    std::set<std::vector<double>> seen;
    bool origin = false;
    for (const auto &p : points) {
      detail::Require(p.point.dim() == space.dim(), ErrorKind::kDimensionMismatch,
                      "point " + std::to_string(p.id) + " has wrong dimension");
      detail::Require(p.id != kSyntheticOriginId, ErrorKind::kInvalidArgument,
                      "point id -1 is reserved");
      detail::Require(ids.insert(p.id).second, ErrorKind::kInvalidArgument,
                      "duplicate point id " + std::to_string(p.id));
      const auto c = p.point.coords();
      detail::Require(seen.emplace(c.begin(), c.end()).second,
                      ErrorKind::kInvalidArgument,
                      "duplicate point (id " + std::to_string(p.id) + ")");
      origin = origin || p.point.is_zero();
    }
    return LocallyFiniteSet(std::move(space), std::move(points), origin);
  }

  //! Ids are assigned 0, 1, 2, ... in order.
  static LocallyFiniteSet FromPoints(Space space, std::vector<Point> points) {
    std::vector<LabeledPoint> labeled;
    labeled.reserve(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      labeled.push_back({static_cast<std::int64_t>(k), std::move(points[k])});
    }
    return Make(std::move(space), std::move(labeled));
  }

  const Space &space() const noexcept { return space_; }
  const std::vector<LabeledPoint> &points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool includes_origin() const noexcept { return includes_origin_; }

 private:
  LocallyFiniteSet(Space space, std::vector<LabeledPoint> points, bool origin)
      : space_(std::move(space)), points_(std::move(points)), includes_origin_(origin) {}

  Space space_;
  std::vector<LabeledPoint> points_;
  bool includes_origin_;
};

//! A unit direction u of U_i together with its angle set T_i(u).
struct Direction {
  Point u;
  std::vector<double> angles;
};

struct LevelDecomposition {
  std::size_t level;                  // 1-based
  std::vector<std::int64_t> members;  // ids of M_i, origin included
  std::vector<Direction> directions;  // U_i
};

struct AnnulusDecomposition {
  std::vector<LevelDecomposition> levels;

  const LevelDecomposition &level(std::size_t i) const { return levels.at(i - 1); }
};

namespace detail {

inline double LogNorm(double n) {
  return n == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(n);
}

// Same direction when every coordinate agrees within 1e-12.
inline bool SameDirection(const Point &a, const Point &b) {
  for (std::size_t k = 0; k < a.dim(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-12) return false;
  return true;
}

struct NormedPoint {
  std::int64_t id;
  const Point *point;
  double norm;
  double log_norm;
};

inline bool InLevel(const RadiiSchedule &s, std::size_t i, double log_norm) {
  return log_norm == -std::numeric_limits<double>::infinity() ||
         (log_norm > s.log_R(i - 1) && log_norm <= s.log_r(i + 1));
}

}  // namespace detail

inline AnnulusDecomposition decompose(const LocallyFiniteSet &pts,
                                      const RadiiSchedule &sched) {
  const auto &space = pts.space();
  const WeightSystem ws(sched);
  const Point origin = Point::Zeros(space.dim());

  std::vector<detail::NormedPoint> all;
  all.reserve(pts.size() + 1);
  for (const auto &p : pts.points()) {
    const double n = norm(space, p.point);
    const double ln = detail::LogNorm(n);
    detail::Require(!(ln > sched.log_coverage()), ErrorKind::kOutOfScheduleRange,
                    "point " + std::to_string(p.id) + " lies beyond schedule coverage");
    all.push_back({p.id, &p.point, n, ln});
  }
  if (!pts.includes_origin()) {
    all.push_back({kSyntheticOriginId, &origin, 0.0,
                   -std::numeric_limits<double>::infinity()});
  }

  AnnulusDecomposition out;
  for (std::size_t i = 1; i <= sched.levels(); ++i) {
    LevelDecomposition lvl{i, {}, {}};
    std::vector<const detail::NormedPoint *> members;
    for (const auto &p : all) {
      if (detail::InLevel(sched, i, p.log_norm)) {
        members.push_back(&p);
        lvl.members.push_back(p.id);
      }
    }
    for (const auto *x : members) {
      if (!(x->log_norm > sched.log_r(i))) continue;
      const double angle = ws.TauLog(i, x->log_norm);
      for (const auto *y : members) {
        if (x == y || y->norm > x->norm || y->log_norm > sched.log_R(i)) continue;
        const Point diff = *x->point - *y->point;
        const Point u = (1.0 / norm(space, diff)) * diff;
        auto it = std::find_if(lvl.directions.begin(), lvl.directions.end(),
                               [&](const Direction &d) { return detail::SameDirection(d.u, u); });
        if (it == lvl.directions.end()) {
          lvl.directions.push_back({u, {angle}});
        } else if (std::find(it->angles.begin(), it->angles.end(), angle) ==
                   it->angles.end()) {
          it->angles.push_back(angle);
        }
      }
    }
    out.levels.push_back(std::move(lvl));
  }
  return out;
}

enum class PairKind { kSameLevel, kFar };

//! SameLevel(level) or Far(level, far_level) with y in A_{R_{i-1},R_i} and
//! x in A_{r_{j+1},r_{j+2}}.
struct PairClass {
  PairKind kind;
  std::size_t level;
  std::size_t far_level = 0;

  friend bool operator==(const PairClass &, const PairClass &) = default;
};

//! Inclusive range of levels whose M_i contains a point with this log-norm.
inline std::pair<std::size_t, std::size_t> LevelsContaining(const RadiiSchedule &s,
                                                           double log_norm) {
  detail::Require(!(log_norm > s.log_coverage()), ErrorKind::kOutOfScheduleRange,
                  "norm beyond schedule coverage");
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i <= s.levels(); ++i) {
    if (detail::InLevel(s, i, log_norm)) {
      if (lo == 0) lo = i;
      hi = i;
    }
  }
  return {lo, hi};
}

inline PairClass ClassifyByNorms(const RadiiSchedule &s, double norm_x, double norm_y) {
  detail::Require(norm_x >= norm_y, ErrorKind::kInvalidArgument,
                  "classify_pair expects |x| >= |y|");
  const double lx = detail::LogNorm(norm_x);
  const double ly = detail::LogNorm(norm_y);
  const auto [xlo, xhi] = LevelsContaining(s, lx);
  const auto [ylo, yhi] = LevelsContaining(s, ly);
  const std::size_t lo = std::max(xlo, ylo);
  const std::size_t hi = std::min(xhi, yhi);
  if (lo <= hi) return {PairKind::kSameLevel, lo, 0};

  std::size_t i = 1;
  while (i < s.levels() && ly > s.log_R(i)) ++i;
  std::size_t j = i;
  while (j + 2 <= s.levels() + 1 && lx > s.log_r(j + 2)) ++j;
  return {PairKind::kFar, i, j};
}

inline PairClass classify_pair(const Space &space, const Point &x, const Point &y,
                               const RadiiSchedule &sched) {
  return ClassifyByNorms(sched, norm(space, x), norm(space, y));
}

enum class Placement { kPlateau, kRamp, kMixed };

/**
 * Seeded test instance: per_level points for each level i whose norms fall in
 * the plateau [R_{i-1}, r_i] or the ramp (r_i, R_i) of that level, plus the
 * origin (id 0). The level-1 plateau starts one delta-gap below r_1. With
 * only_level set, every point is drawn from that level.
 */
inline LocallyFiniteSet generate_annular(std::uint64_t seed, const RadiiSchedule &sched,
                                         std::size_t per_level, const Space &space,
                                         Placement placement,
                                         std::optional<std::size_t> only_level = {}) {
  detail::Require(per_level >= 1, ErrorKind::kInvalidArgument, "per_level must be >= 1");
  if (only_level) {
    detail::Require(*only_level >= 1 && *only_level <= sched.levels(),
                    ErrorKind::kInvalidArgument, "only_level out of range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Point> points{Point::Zeros(space.dim())};
  for (std::size_t i = 1; i <= sched.levels(); ++i) {
    const std::size_t count = only_level ? (i == *only_level ? per_level * sched.levels() : 0)
                                         : per_level;
    const double plateau_lo = i == 1 ? DefaultGridStart(sched) : sched.log_R(i - 1);
    for (std::size_t k = 0; k < count; ++k) {
      const bool ramp = placement == Placement::kRamp ||
                        (placement == Placement::kMixed && k % 2 == 0);
      double lo = ramp ? sched.log_r(i) : plateau_lo;
      double hi = ramp ? sched.log_R(i) : sched.log_r(i);
      const double inset = 1e-9 * (hi - lo);
      lo += inset;
      hi -= inset;
      const double log_norm = lo + (hi - lo) * unif(rng);
      std::vector<double> g(space.dim());
      double n = 0.0;
      while (n == 0.0) {
        for (auto &v : g) v = gauss(rng);
        n = space.Norm(g);
      }
      const double scale = std::exp(log_norm) / n;
      for (auto &v : g) v *= scale;
      points.emplace_back(std::move(g));
    }
  }
  return LocallyFiniteSet::FromPoints(space, std::move(points));
}

}  // namespace spiralglue
