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
 * @file bank.hpp
 *
 * @brief Banks of certified almost-isometric embeddings psi_n, spreading-limit
 * estimation along the bank, and the subsequence search that keeps
 * |cos t Psi_i(u) + sin t Psi_{i+1}(u)| above sqrt(2)/(3(1+zeta)).
 *
 * A bank is certified on an explicit vector set only: every map satisfies
 * |v| <= |psi_n v| <= (1+eps_n)|v| on it, with eps_n an equal share of the
 * budget, prod(1+eps_n) = 1+gamma.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "pointset.hpp"
#include "spaces.hpp"

namespace spiralglue {

//! psi_n copies the source coordinates into the n-th disjoint target block.
struct BlockShift {
  std::size_t block_width = 0;
};

//! l_2 source into an l_1 target: psi_n x = w (<x, theta_k>)_k over a set of
//! directions, a quadrature of |x|_2 = c * integral |<x, theta>| dtheta.
struct QuadratureL2toL1 {
  std::size_t directions = 64;
  std::uint64_t seed = 0;
};

//! Explicit row-major (target x source) matrices.
struct UserMatrices {
  std::vector<std::vector<double>> matrices;
};

using BankStrategy = std::variant<BlockShift, QuadratureL2toL1, UserMatrices>;

inline constexpr double kCertifyTolerance = 1e-12;

struct MapCertificate {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
};

class CertificationFailed : public Error {
 public:
  CertificationFailed(std::size_t map_index, Point worst, double ratio, double eps_n)
      : Error(ErrorKind::kCertificationFailed,
              "map " + std::to_string(map_index) + " has ratio " +
                  std::to_string(ratio) + " outside [1, 1+" + std::to_string(eps_n) +
                  "]"),
        map_index_(map_index),
        worst_(std::move(worst)),
        ratio_(ratio) {}

  std::size_t map_index() const noexcept { return map_index_; }
  const Point &worst_vector() const noexcept { return worst_; }
  double ratio() const noexcept { return ratio_; }

 private:
  std::size_t map_index_;
  Point worst_;
  double ratio_;
};

struct EmbeddingBank {
  std::vector<LinearMap> maps;
  std::vector<double> eps_n;
  double gamma = 0.0;
  BankStrategy strategy;
  std::vector<MapCertificate> certificates;
  std::size_t certified_vectors = 0;

  std::size_t size() const noexcept { return maps.size(); }
  const Space &source() const { return maps.front().source(); }
  const Space &target() const { return maps.front().target(); }

  double BudgetProduct() const {
    double prod = 1.0;
    for (double e : eps_n) prod *= 1.0 + e;
    return prod;
  }
};

namespace detail {

inline bool IsLp(const Space &s, double p) {
  const auto *n = std::get_if<LpNorm>(&s.norm());
  return n && !n->p.is_infinite() && n->p.value() == p;
}

inline MapCertificate Certify(const LinearMap &map, const std::vector<Point> &vectors,
                              std::size_t index, double eps_n) {
  MapCertificate cert;
  const Point *lo_vec = nullptr;
  const Point *hi_vec = nullptr;
  for (const auto &v : vectors) {
    const double nv = map.source().Norm(v.coords());
    if (nv == 0.0) continue;
    const double ratio = map.target().Norm(apply(map, v).coords()) / nv;
    if (ratio < cert.min_ratio) {
      cert.min_ratio = ratio;
      lo_vec = &v;
    }
    if (ratio > cert.max_ratio) {
      cert.max_ratio = ratio;
      hi_vec = &v;
    }
  }
  if (lo_vec && cert.min_ratio < 1.0 - kCertifyTolerance) {
    throw CertificationFailed(index, *lo_vec, cert.min_ratio, eps_n);
  }
  if (hi_vec && cert.max_ratio > 1.0 + eps_n + kCertifyTolerance) {
    throw CertificationFailed(index, *hi_vec, cert.max_ratio, eps_n);
  }
  return cert;
}

inline std::vector<Point> UnitProbes(const Space &space, std::size_t count,
                                     std::uint64_t seed) {
  std::vector<Point> out;
  out.reserve(count);
  if (space.dim() == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / count;
      out.push_back(Point{std::cos(a), std::sin(a)});
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> g(space.dim());
    for (auto &v : g) v = gauss(rng);
    const double n = space.Norm(g);
    if (n == 0.0) continue;
    for (auto &v : g) v /= n;
    out.emplace_back(std::move(g));
  }
  return out;
}

inline std::vector<LinearMap> QuadratureMaps(const QuadratureL2toL1 &q, const Space &source,
                                             const Space &target, std::size_t count,
                                             const std::vector<Point> &certify_set) {
  Require(IsLp(source, 2.0), ErrorKind::kInvalidArgument,
          "quadrature strategy needs an l_2 source");
  Require(IsLp(target, 1.0), ErrorKind::kInvalidArgument,
          "quadrature strategy needs an l_1 target");
  Require(q.directions >= 2, ErrorKind::kInvalidArgument, "need >= 2 directions");
  const std::size_t d = source.dim();
  const std::size_t k_dirs = q.directions;
  Require(target.dim() >= count * k_dirs, ErrorKind::kDimensionMismatch,
          "quadrature target needs dimension >= count * directions");

  std::mt19937_64 rng(q.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto probes = UnitProbes(source, 4096, q.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<LinearMap> maps;
  for (std::size_t n = 0; n < count; ++n) {
    // rows of the k_dirs x d block
    std::vector<std::vector<double>> dirs(k_dirs, std::vector<double>(d));
    if (d == 2) {
      const double offset = unif(rng) * std::numbers::pi / k_dirs;
      for (std::size_t k = 0; k < k_dirs; ++k) {
        const double a = offset + std::numbers::pi * static_cast<double>(k) / k_dirs;
        dirs[k] = {std::cos(a), std::sin(a)};
      }
    } else {
      for (auto &row : dirs) {
        double s = 0.0;
        for (auto &v : row) {
          v = gauss(rng);
          s += v * v;
        }
        s = std::sqrt(s);
        for (auto &v : row) v /= s;
      }
    }
    std::vector<double> data(target.dim() * d, 0.0);
    for (std::size_t k = 0; k < k_dirs; ++k)
      for (std::size_t c = 0; c < d; ++c) data[(n * k_dirs + k) * d + c] = dirs[k][c];
    auto raw = LinearMap::Make(source, target, data);

    // Normalize so the smallest ratio over probes and certify set is 1.
    double min_ratio = std::numeric_limits<double>::infinity();
    auto scan = [&](const std::vector<Point> &vs) {
      for (const auto &v : vs) {
        const double nv = source.Norm(v.coords());
        if (nv == 0.0) continue;
        min_ratio = std::min(min_ratio, target.Norm(apply(raw, v).coords()) / nv);
      }
    };
    scan(probes);
    scan(certify_set);
    Require(min_ratio > 0.0 && std::isfinite(min_ratio), ErrorKind::kCertificationFailed,
            "quadrature map " + std::to_string(n) + " is degenerate");
    for (auto &v : data) v /= min_ratio;
    maps.push_back(LinearMap::Make(source, target, std::move(data)));
  }
  return maps;
}

}  // namespace detail

/**
 * Builds and certifies count maps. Certification runs on every nonzero vector
 * of certify_set (callers pass points, pairwise differences and random unit
 * vectors); any map leaving [1, 1+eps_n] raises CertificationFailed.
 */
inline EmbeddingBank build_bank(const BankStrategy &strategy, const Space &source,
                                const Space &target, double gamma, std::size_t count,
                                const std::vector<Point> &certify_set) {
  detail::Require(std::isfinite(gamma) && gamma >= 0.0, ErrorKind::kInvalidArgument,
                  "gamma must be nonnegative");
  detail::Require(!certify_set.empty(), ErrorKind::kInvalidArgument,
                  "certification set is empty");
  for (const auto &v : certify_set) {
    detail::Require(v.dim() == source.dim(), ErrorKind::kDimensionMismatch,
                    "certification vector has wrong dimension");
  }

  EmbeddingBank bank;
  bank.gamma = gamma;
  bank.strategy = strategy;
  if (const auto *user = std::get_if<UserMatrices>(&strategy)) {
    detail::Require(count == 0 || count == user->matrices.size(),
                    ErrorKind::kInvalidArgument,
                    "count differs from the number of user matrices");
    count = user->matrices.size();
  }
  detail::Require(count >= 2, ErrorKind::kInvalidArgument, "bank needs >= 2 maps");

  std::visit(
      [&](const auto &s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BlockShift>) {
          const std::size_t width = s.block_width ? s.block_width : source.dim();
          detail::Require(width >= source.dim(), ErrorKind::kInvalidArgument,
                          "block width below source dimension");
          detail::Require(target.dim() >= count * width,
                          ErrorKind::kDimensionMismatch,
                          "block-shift target needs dimension >= count * block_width");
          for (std::size_t n = 0; n < count; ++n) {
            std::vector<double> data(target.dim() * source.dim(), 0.0);
            for (std::size_t c = 0; c < source.dim(); ++c)
              data[(n * width + c) * source.dim() + c] = 1.0;
            bank.maps.push_back(LinearMap::Make(source, target, std::move(data)));
          }
        } else if constexpr (std::is_same_v<T, QuadratureL2toL1>) {
          bank.maps = detail::QuadratureMaps(s, source, target, count, certify_set);
        } else {
          for (const auto &m : s.matrices)
            bank.maps.push_back(LinearMap::Make(source, target, m));
        }
      },
      strategy);

  const double share = std::expm1(std::log1p(gamma) / static_cast<double>(count));
  bank.eps_n.assign(count, share);
  detail::Require(bank.BudgetProduct() <= (1.0 + gamma) * (1.0 + 1e-12),
                  ErrorKind::kInvalidArgument, "budget product exceeds 1+gamma");
  for (std::size_t n = 0; n < count; ++n) {
    bank.certificates.push_back(
        detail::Certify(bank.maps[n], certify_set, n, bank.eps_n[n]));
  }
  bank.certified_vectors = certify_set.size();
  return bank;
}

struct SpreadingEstimate {
  double value;        // midpoint of the tail range
  std::size_t start;   // smallest start index nu reaching the tolerance
  double oscillation;  // max - min over the tail tuples
};

/**
 * Estimates L(a) = lim |sum_k a_k psi_{n_k}(u)| over increasing tuples
 * nu <= n_1 < n_2 < ...: for nu = 0, 1, ..., max_start the oscillation of the
 * norm over all tuples drawn from [nu, N) is measured, and the first tail with
 * oscillation below tol is returned. Every inspected tail keeps at least
 * 2 * len(a) indices so that it holds several tuples.
 */
inline SpreadingEstimate spreading_limit_estimate(const EmbeddingBank &bank, const Point &u,
                                                  const std::vector<double> &a, double tol,
                                                  std::size_t max_start) {
  detail::Require(!a.empty() && std::any_of(a.begin(), a.end(),
                                            [](double v) { return v != 0.0; }),
                  ErrorKind::kInvalidArgument, "coefficients must have a nonzero entry");
  const std::size_t k = a.size();
  const std::size_t n = bank.size();
  detail::Require(n >= 2 * k, ErrorKind::kInvalidArgument,
                  "bank too small for the coefficient length");
  const std::size_t last_start = std::min(max_start, n - 2 * k);

  std::vector<Point> images;
  images.reserve(n);
  for (const auto &m : bank.maps) images.push_back(apply(m, u));
  const Space &target = bank.target();

  double best_osc = std::numeric_limits<double>::infinity();
  for (std::size_t nu = 0; nu <= last_start; ++nu) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<std::size_t> idx(k);
    std::vector<double> acc(target.dim());
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth,
                                                            std::size_t from) {
      if (depth == k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t t = 0; t < k; ++t)
          for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += a[t] * images[idx[t]][c];
        const double v = target.Norm(acc);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        return;
      }
      for (std::size_t m = from; m + (k - depth) <= n; ++m) {
        idx[depth] = m;
        rec(depth + 1, m + 1);
      }
    };
    rec(0, nu);
    best_osc = std::min(best_osc, hi - lo);
    if (hi - lo < tol) return {(lo + hi) / 2.0, nu, hi - lo};
  }
  detail::Fail(ErrorKind::kNotStabilized,
               "oscillation " + std::to_string(best_osc) + " never fell below " +
                   std::to_string(tol));
}

inline double SelectionThreshold(double zeta) {
  return std::numbers::sqrt2 / (3.0 * (1.0 + zeta));
}

struct LevelMargin {
  std::size_t level;
  std::size_t checks = 0;  // number of (u, tau) pairs tested
  //! min |cos t Psi_i u + sin t Psi_{i+1} u| minus the threshold; +inf if U_i is empty.
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_norm = std::numeric_limits<double>::infinity();
  std::optional<Point> worst_u;
  double worst_angle = 0.0;
};

struct SelectionResult {
  std::vector<std::size_t> chosen;  // m + 1 strictly increasing bank indices
  std::vector<LevelMargin> levels;
  double threshold = 0.0;
};

class BankExhausted : public Error {
 public:
  BankExhausted(std::size_t level, std::optional<Point> u, double angle, double achieved,
                double threshold)
      : Error(ErrorKind::kBankExhausted,
              "no admissible bank pair at level " + std::to_string(level) +
                  ": best achieved norm " + std::to_string(achieved) + " at angle " +
                  std::to_string(angle) + " below threshold " + std::to_string(threshold)),
        level_(level),
        u_(std::move(u)),
        angle_(angle),
        achieved_(achieved) {}

  std::size_t level() const noexcept { return level_; }
  const std::optional<Point> &worst_u() const noexcept { return u_; }
  double angle() const noexcept { return angle_; }
  double achieved() const noexcept { return achieved_; }

 private:
  std::size_t level_;
  std::optional<Point> u_;
  double angle_;
  double achieved_;
};

/**
 * Finds strictly increasing indices n_1 < ... < n_{m+1} such that for every
 * level i, u in U_i and tau in T_i(u) the two-term norm with (psi_{n_i},
 * psi_{n_{i+1}}) reaches the threshold. Candidates are scanned in increasing
 * order and the first admissible one is taken; a dead end backtracks to the
 * previous level. Failed (level, index) states are memoized, so the search is
 * polynomial in the bank size.
 */
inline SelectionResult select_subsequence(const EmbeddingBank &bank,
                                          const AnnulusDecomposition &decomp, double zeta) {
  const std::size_t m = decomp.levels.size();
  const std::size_t n = bank.size();
  detail::Require(m >= 1, ErrorKind::kInvalidArgument, "decomposition has no levels");
  detail::Require(n >= m + 1, ErrorKind::kInvalidArgument,
                  "bank needs at least levels + 1 maps");
  const double threshold = SelectionThreshold(zeta);
  const Space &target = bank.target();

  // images[i-1][k][n] = psi_n(u_k) for u_k in U_i
  std::vector<std::vector<std::vector<Point>>> images(m);
  for (std::size_t i = 1; i <= m; ++i) {
    const auto &dirs = decomp.level(i).directions;
    images[i - 1].resize(dirs.size());
    for (std::size_t k = 0; k < dirs.size(); ++k)
      for (const auto &map : bank.maps) images[i - 1][k].push_back(apply(map, dirs[k].u));
  }

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, LevelMargin> memo;
  auto evaluate = [&](std::size_t i, std::size_t a, std::size_t b) -> const LevelMargin & {
    auto key = std::make_tuple(i, a, b);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    LevelMargin lm;
    lm.level = i;
    const auto &dirs = decomp.level(i).directions;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      for (double t : dirs[k].angles) {
        const double v = target.Norm(
            SpiralCombine(std::cos(t), images[i - 1][k][a], std::sin(t), images[i - 1][k][b])
                .coords());
        ++lm.checks;
        if (v < lm.worst_norm) {
          lm.worst_norm = v;
          lm.worst_margin = v - threshold;
          lm.worst_u = dirs[k].u;
          lm.worst_angle = t;
        }
      }
    }
    return memo.emplace(key, std::move(lm)).first->second;
  };

  std::vector<std::size_t> chosen(m + 1);
  std::vector<std::vector<bool>> dead(m + 2, std::vector<bool>(n, false));
  std::size_t deepest = 0;
  std::optional<LevelMargin> deepest_best;

  std::function<bool(std::size_t, std::size_t)> extend = [&](std::size_t i,
                                                              std::size_t a) -> bool {
    if (i > m) return true;
    if (dead[i][a]) return false;
    for (std::size_t b = a + 1; b + (m - i) < n; ++b) {
      const LevelMargin &lm = evaluate(i, a, b);
      if (lm.worst_norm >= threshold) {
        chosen[i] = b;
        if (extend(i + 1, b)) return true;
      } else if (i > deepest ||
                 (i == deepest && (!deepest_best || lm.worst_norm > deepest_best->worst_norm))) {
        deepest = i;
        deepest_best = lm;
      }
    }
    dead[i][a] = true;
    return false;
  };

  for (std::size_t a = 0; a + m < n; ++a) {
    chosen[0] = a;
    if (extend(1, a)) {
      SelectionResult result{chosen, {}, threshold};
      for (std::size_t i = 1; i <= m; ++i)
        result.levels.push_back(evaluate(i, chosen[i - 1], chosen[i]));
      return result;
    }
  }
  if (deepest_best) {
    throw BankExhausted(deepest, deepest_best->worst_u, deepest_best->worst_angle,
                        deepest_best->worst_norm, threshold);
  }
  throw BankExhausted(1, std::nullopt, 0.0, 0.0, threshold);
}

}  // namespace spiralglue
