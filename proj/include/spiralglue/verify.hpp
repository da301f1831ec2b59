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
 * @file verify.hpp
 *
 * @brief Closed-form distortion bounds and their evaluation on concrete data.
 *
 * With a = sqrt(2)/(3(1+zeta)) and b = sqrt(2)(1+gamma):
 *   same level:  a - eps b  <= ratio <= b (1 + eps)
 *   ray (y = 0): a          <= ratio <= b
 *   far pairs:   (a - b delta)/(1+delta) <= ratio <= b (1+delta)/(1-delta)
 *   plateau:     1          <= ratio <= 1 + gamma
 * and for every same-level pair, with sigma = tau(|x|),
 * theta = pi/2 + (tau(|x|) + tau(|y|))/2, w = (x-y)/|x-y|, v = y/|y|:
 *   g(sigma, w) - eps g(theta, v) <= ratio <= g(sigma, w) + eps g(theta, v).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bank.hpp"
#include "error.hpp"
#include "glue.hpp"
#include "pointset.hpp"
#include "schedule.hpp"

namespace spiralglue {

inline constexpr double kSlackTolerance = 1e-9;

struct TheoreticalBounds {
  double L_same, U_same;
  double L_ray, U_ray;
  double L_far, U_far;
  double ratio;  // max(U_same, U_far) / min(L_same, L_far)
};

inline TheoreticalBounds theoretical_bounds(const Params &p) {
  p.Validate();
  const double a = std::numbers::sqrt2 / (3.0 * (1.0 + p.zeta));
  const double b = std::numbers::sqrt2 * (1.0 + p.gamma);
  TheoreticalBounds t{};
  t.L_same = a - p.eps * b;
  t.U_same = b + p.eps * b;
  t.L_ray = a;
  t.U_ray = b;
  t.L_far = (a - b * p.delta) / (1.0 + p.delta);
  t.U_far = b * (1.0 + p.delta) / (1.0 - p.delta);
  detail::Require(t.L_same > 0.0 && t.L_far > 0.0, ErrorKind::kNonPositiveLowerBound,
                  "lower bounds L_same = " + std::to_string(t.L_same) +
                      ", L_far = " + std::to_string(t.L_far) + " are not positive");
  t.ratio = std::max(t.U_same, t.U_far) / std::min(t.L_same, t.L_far);
  return t;
}

/**
 * Shrinks a common scale s = 1/2, 1/4, ... on (eps, delta, gamma, zeta) = s
 * until both lower bounds reach sqrt(2)/(3 sqrt(1+e/3)) and both upper bounds
 * stay below sqrt(2) sqrt(1+e/3); the bound ratio is then at most 3 + e.
 */
inline Params solve_params(double eps_target) {
  detail::Require(eps_target > 0.0, ErrorKind::kInvalidArgument,
                  "target must be positive");
  const double k = std::sqrt(1.0 + eps_target / 3.0);
  const double want_lower = std::numbers::sqrt2 / (3.0 * k);
  const double want_upper = std::numbers::sqrt2 * k;
  double s = 0.5;
  for (int iter = 0; iter < 1000; ++iter, s *= 0.5) {
    const Params p{s, s, s, s};
    try {
      const auto t = theoretical_bounds(p);
      if (std::min(t.L_same, t.L_far) >= want_lower &&
          std::max(t.U_same, t.U_far) <= want_upper) {
        return p;
      }
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kNonPositiveLowerBound) throw;
    }
  }
  detail::Fail(ErrorKind::kInvalidArgument, "parameter search did not converge");
}

//! max{ c(c+s)/(c+2s), s(c+s)/(2c+s) } for c, s >= 0 not both zero.
inline double pab_lower_bound(double c, double s) {
  detail::Require(c >= 0.0 && s >= 0.0, ErrorKind::kInvalidArgument,
                  "coefficients must be nonnegative");
  detail::Require(c + s > 0.0, ErrorKind::kBothZero, "both coefficients are zero");
  return std::max(c * (c + s) / (c + 2.0 * s), s * (c + s) / (2.0 * c + s));
}

//! cos t (1 + tan t)/(1 + 2 tan t), the bound on [0, pi/4].
inline double PabP(double t) {
  const double tn = std::tan(t);
  return std::cos(t) * (1.0 + tn) / (1.0 + 2.0 * tn);
}

//! sin t (1 + cot t)/(1 + 2 cot t), the bound on [pi/4, pi/2].
inline double PabQ(double t) {
  const double ct = std::cos(t) / std::sin(t);
  return std::sin(t) * (1.0 + ct) / (1.0 + 2.0 * ct);
}

struct LaMinResult {
  double min_value;
  double argmin;
  double at_zero;
  double at_half_pi;
  bool p_nonincreasing;  // on the grid points in [0, pi/4]
  bool q_nondecreasing;  // on the grid points in [pi/4, pi/2]
  //! max |pab_lower_bound(cos t, sin t) - (p or q)(t)| over the grid.
  double max_closed_form_gap;
};

inline LaMinResult la_min_check(std::size_t grid_size) {
  detail::Require(grid_size >= 3, ErrorKind::kInvalidArgument, "grid needs >= 3 points");
  const double quarter = std::numbers::pi / 4.0;
  const auto grid = detail::LinSpace(0.0, std::numbers::pi / 2.0, grid_size);
  LaMinResult r{std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0, true, true, 0.0};
  double prev_p = std::numeric_limits<double>::infinity();
  double prev_q = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double v = pab_lower_bound(std::cos(t), std::sin(t));
    if (v < r.min_value) {
      r.min_value = v;
      r.argmin = t;
    }
    if (t <= quarter) {
      const double p = PabP(t);
      if (p > prev_p + 1e-15) r.p_nonincreasing = false;
      prev_p = p;
      r.max_closed_form_gap = std::max(r.max_closed_form_gap, std::abs(v - p));
    }
    if (t >= quarter) {
      const double q = PabQ(t);
      if (q < prev_q - 1e-15) r.q_nondecreasing = false;
      prev_q = q;
      r.max_closed_form_gap = std::max(r.max_closed_form_gap, std::abs(v - q));
    }
  }
  r.at_zero = pab_lower_bound(std::cos(grid.front()), std::sin(grid.front()));
  r.at_half_pi = pab_lower_bound(std::cos(grid.back()), std::sin(grid.back()));
  return r;
}

/**
 * Relative residual of T(x) - T(y) = G_sigma(x-y) + 2 sin((tau_x - tau_y)/2) G_theta y
 * for the level map built from e, f: the target norm of the difference divided
 * by |x| + |y|.
 */
inline double DifferenceIdentityResidual(const WeightSystem &ws, std::size_t level,
                                         const LinearMap &e, const LinearMap &f, const Point &x,
                                         const Point &y) {
  const Space &src = e.source();
  const Space &dst = e.target();
  const double lx = WeightSystem::LogOf(norm(src, x));
  const double ly = WeightSystem::LogOf(norm(src, y));
  const auto cx = ws.CoefficientsLog(level, lx);
  const auto cy = ws.CoefficientsLog(level, ly);
  const Point tx = SpiralCombine(cx.c, apply(e, x), cx.s, apply(f, x));
  const Point ty = SpiralCombine(cy.c, apply(e, y), cy.s, apply(f, y));
  const double tau_x = ws.TauLog(level, lx);
  const double tau_y = ws.TauLog(level, ly);
  const double theta = std::numbers::pi / 2.0 + (tau_x + tau_y) / 2.0;
  const Point d = x - y;
  const Point g_sigma = SpiralCombine(std::cos(tau_x), apply(e, d), std::sin(tau_x), apply(f, d));
  const Point g_theta = SpiralCombine(std::cos(theta), apply(e, y), std::sin(theta), apply(f, y));
  const Point rhs = SpiralCombine(1.0, g_sigma, 2.0 * std::sin((tau_x - tau_y) / 2.0), g_theta);
  const double scale = norm(src, x) + norm(src, y);
  return scale == 0.0 ? 0.0 : norm(dst, (tx - ty) - rhs) / scale;
}

struct InequalityCheck {
  std::string name;
  double lower_slack;  // +inf when the inequality has no lower side
  double upper_slack;  // +inf when it has no upper side
};

struct PairCheck {
  std::int64_t x_id = 0;
  std::int64_t y_id = 0;
  PairClass cls{PairKind::kSameLevel, 1, 0};
  double ratio = 0.0;
  //! Same-level pairs with y != 0; NaN otherwise.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double g_sigma_w = std::numeric_limits<double>::quiet_NaN();
  double g_theta_v = std::numeric_limits<double>::quiet_NaN();
  //! Which closed-form bracket applied: plateau, ray, same_level or far.
  std::string bracket;
  double lower_slack = std::numeric_limits<double>::infinity();
  double upper_slack = std::numeric_limits<double>::infinity();
  std::vector<InequalityCheck> checks;

  double WorstSlack() const { return std::min(lower_slack, upper_slack); }

  const InequalityCheck *WorstCheck() const {
    const InequalityCheck *w = nullptr;
    for (const auto &c : checks)
      if (!w || std::min(c.lower_slack, c.upper_slack) <
                    std::min(w->lower_slack, w->upper_slack))
        w = &c;
    return w;
  }
};

class BoundViolated : public Error {
 public:
  BoundViolated(std::string which, double slack, std::int64_t x_id, std::int64_t y_id)
      : Error(ErrorKind::kBoundViolated,
              which + " violated by pair (" + std::to_string(x_id) + ", " +
                  std::to_string(y_id) + ") with slack " + std::to_string(slack)),
        which_(std::move(which)),
        slack_(slack),
        x_id_(x_id),
        y_id_(y_id) {}

  const std::string &which() const noexcept { return which_; }
  double slack() const noexcept { return slack_; }
  std::int64_t x_id() const noexcept { return x_id_; }
  std::int64_t y_id() const noexcept { return y_id_; }

 private:
  std::string which_;
  double slack_;
  std::int64_t x_id_;
  std::int64_t y_id_;
};

namespace detail {

inline void AddCheck(PairCheck &pc, std::string name, double lower, double upper) {
  pc.lower_slack = std::min(pc.lower_slack, lower);
  pc.upper_slack = std::min(pc.upper_slack, upper);
  pc.checks.push_back({std::move(name), lower, upper});
}

// Both norms inside one closed plateau [R_{j-1}, r_j] (the last one is
// [R_m, r_{m+1}]); the origin lies in every plateau.
inline bool OnCommonPlateau(const RadiiSchedule &s, double lx, double ly) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= s.levels() + 1; ++j) {
    auto inside = [&](double l) {
      return l == neg_inf || (l >= s.log_R(j - 1) && l <= s.log_r(j));
    };
    if (inside(lx) && inside(ly)) return true;
  }
  return false;
}

}  // namespace detail

/**
 * Evaluates every applicable inequality for one pair without throwing on
 * violations. Requires |x| >= |y| and x != y. Brackets that depend on the
 * closed-form bounds are skipped when bounds is empty.
 */
inline PairCheck AnalyzePair(const GlueEmbedding &g, const LabeledPoint &x,
                             const LabeledPoint &y,
                             const std::optional<TheoreticalBounds> &bounds) {
  const Space &src = g.source();
  const Space &dst = g.target();
  const auto &s = g.schedule();
  const Params &prm = s.params();
  const double nx = norm(src, x.point);
  const double ny = norm(src, y.point);
  detail::Require(nx >= ny, ErrorKind::kInvalidArgument, "check_pair expects |x| >= |y|");
  detail::Require(!(x.point == y.point), ErrorKind::kInvalidArgument,
                  "check_pair needs distinct points");
  const double lx = WeightSystem::LogOf(nx);
  const double ly = WeightSystem::LogOf(ny);

  PairCheck pc;
  pc.x_id = x.id;
  pc.y_id = y.id;
  pc.cls = ClassifyByNorms(s, nx, ny);
  const Point diff = x.point - y.point;
  const double nd = norm(src, diff);
  const Point img_x = g.evaluate(x.point);
  const Point img_y = g.evaluate(y.point);
  pc.ratio = norm(dst, img_x - img_y) / nd;

  auto bracket = [&](const char *name, double lo, double hi) {
    pc.bracket = name;
    detail::AddCheck(pc, name, pc.ratio - lo, hi - pc.ratio);
  };
  const double inf = std::numeric_limits<double>::infinity();

  if (pc.cls.kind == PairKind::kSameLevel) {
    const std::size_t i = pc.cls.level;
    const LinearMap &e = g.level_map(i);
    const LinearMap &f = g.level_map(i + 1);
    const auto &ws = g.weights();
    if (ny > 0.0) {
      const double tx = ws.TauLog(i, lx);
      const double ty = ws.TauLog(i, ly);
      pc.sigma = tx;
      pc.theta = std::numbers::pi / 2.0 + (tx + ty) / 2.0;
      pc.g_sigma_w = g_value(pc.sigma, (1.0 / nd) * diff, e, f);
      pc.g_theta_v = g_value(pc.theta, (1.0 / ny) * y.point, e, f);
      const double lo = pc.g_sigma_w - prm.eps * pc.g_theta_v;
      const double hi = pc.g_sigma_w + prm.eps * pc.g_theta_v;
      detail::AddCheck(pc, "sandwich", pc.ratio - lo, hi - pc.ratio);
      const double residual = DifferenceIdentityResidual(ws, i, e, f, x.point, y.point);
      detail::AddCheck(pc, "difference_identity", kSlackTolerance - residual, inf);
    } else {
      // |T(x)|/|x| = g(tau(|x|), x/|x|)
      const double gx = g_value(ws.TauLog(i, lx), (1.0 / nx) * x.point, e, f);
      const double tx_norm = norm(dst, g.t_map(i, x.point)) / nx;
      const double gap = std::abs(tx_norm - gx);
      detail::AddCheck(pc, "ray_identity", 1e-12 * std::max(1.0, gx) - gap, inf);
    }

    if (detail::OnCommonPlateau(s, lx, ly)) {
      bracket("plateau", 1.0, 1.0 + prm.gamma);
    } else if (bounds && ny == 0.0 && lx > s.log_r(i)) {
      bracket("ray", bounds->L_ray, bounds->U_ray);
    } else if (bounds && ly <= s.log_R(i) && lx > s.log_r(i)) {
      bracket("same_level", bounds->L_same, bounds->U_same);
    }
  } else {
    detail::AddCheck(pc, "far_gap", (prm.delta * nx - ny) / nx, inf);
    detail::AddCheck(pc, "far_norm_bracket", (nx - nd / (1.0 + prm.delta)) / nx,
                     (nd / (1.0 - prm.delta) - nx) / nx);
    if (bounds) bracket("far", bounds->L_far, bounds->U_far);
  }
  return pc;
}

//! AnalyzePair that raises BoundViolated when any slack is below -tol.
inline PairCheck check_pair(const GlueEmbedding &g, const LabeledPoint &x,
                            const LabeledPoint &y,
                            const std::optional<TheoreticalBounds> &bounds,
                            double tol = kSlackTolerance) {
  PairCheck pc = AnalyzePair(g, x, y, bounds);
  if (const auto *w = pc.WorstCheck(); w && std::min(w->lower_slack, w->upper_slack) < -tol) {
    throw BoundViolated(w->name, std::min(w->lower_slack, w->upper_slack), pc.x_id, pc.y_id);
  }
  return pc;
}

struct SlackSummary {
  std::size_t count = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  double worst_lower_slack = std::numeric_limits<double>::infinity();
  double worst_upper_slack = std::numeric_limits<double>::infinity();
};

struct Violation {
  std::int64_t x_id;
  std::int64_t y_id;
  std::string which;
  double slack;
};

struct DistortionReport {
  std::size_t pair_count = 0;
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  double distortion = 1.0;
  std::pair<std::int64_t, std::int64_t> min_witness{0, 0};
  std::pair<std::int64_t, std::int64_t> max_witness{0, 0};
  TheoreticalBounds bounds{};
  double tolerance = kSlackTolerance;
  std::map<std::string, SlackSummary> by_bracket;  // plateau / ray / same_level / far
  std::map<std::string, SlackSummary> by_check;    // every named inequality
  std::vector<PairCheck> pairs;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

struct AnalyzeOptions {
  double tolerance = kSlackTolerance;
  std::size_t workers = 1;
};

/**
 * Sweeps all unordered pairs, each ordered so that |x| >= |y|, and aggregates
 * ratios and slacks. Violations are collected, not thrown. The pair order and
 * the aggregation are independent of the worker count.
 */
inline DistortionReport analyze(const GlueEmbedding &g, const LocallyFiniteSet &pts,
                                const AnalyzeOptions &opt = {}) {
  DistortionReport rep;
  rep.bounds = theoretical_bounds(g.schedule().params());
  rep.tolerance = opt.tolerance;

  const auto &pv = pts.points();
  std::vector<double> norms(pv.size());
  for (std::size_t k = 0; k < pv.size(); ++k) norms[k] = norm(pts.space(), pv[k].point);
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t a = 0; a < pv.size(); ++a)
    for (std::size_t b = a + 1; b < pv.size(); ++b)
      order.emplace_back(norms[a] >= norms[b] ? std::make_pair(a, b) : std::make_pair(b, a));

  rep.pairs.resize(order.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(opt.workers, order.size()));
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      for (std::size_t k = w; k < order.size(); k += workers) {
        rep.pairs[k] = AnalyzePair(g, pv[order[k].first], pv[order[k].second], rep.bounds);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto &t : threads) t.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);

  rep.pair_count = rep.pairs.size();
  if (rep.pairs.empty()) return rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -rep.min_ratio;
  for (const auto &pc : rep.pairs) {
    if (pc.ratio < rep.min_ratio) {
      rep.min_ratio = pc.ratio;
      rep.min_witness = {pc.x_id, pc.y_id};
    }
    if (pc.ratio > rep.max_ratio) {
      rep.max_ratio = pc.ratio;
      rep.max_witness = {pc.x_id, pc.y_id};
    }
    auto fold = [&](SlackSummary &sm, double lo, double hi) {
      ++sm.count;
      sm.min_ratio = std::min(sm.min_ratio, pc.ratio);
      sm.max_ratio = std::max(sm.max_ratio, pc.ratio);
      sm.worst_lower_slack = std::min(sm.worst_lower_slack, lo);
      sm.worst_upper_slack = std::min(sm.worst_upper_slack, hi);
    };
    if (!pc.bracket.empty()) {
      for (const auto &c : pc.checks)
        if (c.name == pc.bracket) fold(rep.by_bracket[pc.bracket], c.lower_slack, c.upper_slack);
    }
    for (const auto &c : pc.checks) {
      fold(rep.by_check[c.name], c.lower_slack, c.upper_slack);
      const double worst = std::min(c.lower_slack, c.upper_slack);
      if (worst < -opt.tolerance) rep.violations.push_back({pc.x_id, pc.y_id, c.name, worst});
    }
  }
  rep.distortion = rep.max_ratio / rep.min_ratio;
  const double total_slack = rep.bounds.ratio - rep.distortion;
  if (total_slack < -opt.tolerance) {
    rep.violations.push_back(
        {rep.max_witness.first, rep.max_witness.second, "total_distortion", total_slack});
  }
  return rep;
}

//! analyze() followed by BoundViolated on the first recorded violation.
inline DistortionReport distortion(const GlueEmbedding &g, const LocallyFiniteSet &pts,
                                   const AnalyzeOptions &opt = {}) {
  DistortionReport rep = analyze(g, pts, opt);
  if (!rep.violations.empty()) {
    const auto &v = rep.violations.front();
    throw BoundViolated(v.which, v.slack, v.x_id, v.y_id);
  }
  return rep;
}

//! Row-major D x d matrix with orthonormal columns (an l2 isometry).
inline std::vector<double> RandomIsometry(std::mt19937_64 &rng, std::size_t d, std::size_t big_d) {
  detail::Require(big_d >= d, ErrorKind::kInvalidArgument, "isometry needs D >= d");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> cols;
  while (cols.size() < d) {
    std::vector<double> v(big_d);
    for (auto &c : v) c = gauss(rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto &q : cols) {
        double dot = 0.0;
        for (std::size_t r = 0; r < big_d; ++r) dot += q[r] * v[r];
        for (std::size_t r = 0; r < big_d; ++r) v[r] -= dot * q[r];
      }
    }
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n < 1e-8) continue;
    for (auto &c : v) c /= n;
    cols.push_back(std::move(v));
  }
  std::vector<double> out(big_d * d);
  for (std::size_t r = 0; r < big_d; ++r)
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] = cols[c][r];
  return out;
}

struct FuzzSummary {
  std::size_t pairs = 0;
  double worst_sandwich_slack = std::numeric_limits<double>::infinity();
  double max_identity_residual = 0.0;
  std::size_t ramp_pairs = 0;  // pairs with at least one norm strictly inside a ramp
  std::size_t banks = 0;
};

/**
 * Random same-level pairs for a two-level schedule glued from random l2
 * isometries R^dim -> R^{2 dim}. A fresh bank is drawn and certified on 64
 * random unit vectors every pairs_per_bank pairs. Norms are drawn
 * log-uniformly over the whole level (R_{i-1}, r_{i+1}], so ramps, plateaus
 * and the stretch past R_i are all hit.
 */
inline FuzzSummary FuzzSameLevelPairs(const Params &params, std::uint64_t seed,
                                      std::size_t pairs, std::size_t dim = 3,
                                      std::size_t pairs_per_bank = 50) {
  detail::Require(pairs_per_bank >= 1, ErrorKind::kInvalidArgument,
                  "pairs_per_bank must be positive");
  const std::size_t levels = 2;
  std::mt19937_64 rng(seed);
  const Space src = Space::Lp(dim, 2.0);
  const Space dst = Space::Lp(2 * dim, 2.0);
  const auto sched = build_schedule(params, 1.0, levels, 0.01);
  auto fresh_glue = [&] {
    UserMatrices um;
    for (std::size_t k = 0; k <= levels; ++k)
      um.matrices.push_back(RandomIsometry(rng, dim, 2 * dim));
    std::vector<Point> certify;
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 64; ++k) {
      std::vector<double> v(dim);
      for (auto &c : v) c = unit(rng);
      const double n = src.Norm(v);
      for (auto &c : v) c /= n;
      certify.emplace_back(std::move(v));
    }
    SelectionResult sel;
    for (std::size_t k = 0; k <= levels; ++k) sel.chosen.push_back(k);
    sel.threshold = SelectionThreshold(params.zeta);
    return GlueEmbedding::Make(WeightSystem(sched),
                               build_bank(um, src, dst, params.gamma, 0, certify),
                               std::move(sel));
  };
  std::optional<GlueEmbedding> g;

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_level(1, levels);
  auto draw = [&](double log_norm) {
    std::vector<double> v(dim);
    for (auto &c : v) c = gauss(rng);
    const double n = src.Norm(v);
    const double scale = std::exp(log_norm) / n;
    for (auto &c : v) c *= scale;
    return Point(std::move(v));
  };

  FuzzSummary out;
  while (out.pairs < pairs) {
    if (!g || out.pairs >= out.banks * pairs_per_bank) {
      g = fresh_glue();
      ++out.banks;
    }
    const std::size_t i = pick_level(rng);
    const double lo = i == 1 ? DefaultGridStart(sched) : sched.log_R(i - 1);
    const double hi = sched.log_r(i + 1);
    std::uniform_real_distribution<double> ln(lo, hi);
    Point x = draw(ln(rng));
    Point y = draw(ln(rng));
    double nx = norm(src, x), ny = norm(src, y);
    if (nx < ny) {
      std::swap(x, y);
      std::swap(nx, ny);
    }
    if (x == y) continue;
    const PairClass cls = ClassifyByNorms(sched, nx, ny);
    if (cls.kind != PairKind::kSameLevel) continue;
    const PairCheck pc = AnalyzePair(*g, {0, x}, {1, y}, std::nullopt);
    for (const auto &c : pc.checks) {
      if (c.name == "sandwich")
        out.worst_sandwich_slack = std::min({out.worst_sandwich_slack, c.lower_slack, c.upper_slack});
      if (c.name == "difference_identity")
        out.max_identity_residual = std::max(out.max_identity_residual, kSlackTolerance - c.lower_slack);
    }
    auto on_ramp = [&](double l) {
      for (std::size_t j = 1; j <= levels; ++j)
        if (l > sched.log_r(j) && l < sched.log_R(j)) return true;
      return false;
    };
    if (on_ramp(std::log(nx)) || on_ramp(std::log(ny))) ++out.ramp_pairs;
    ++out.pairs;
  }
  return out;
}

}  // namespace spiralglue
