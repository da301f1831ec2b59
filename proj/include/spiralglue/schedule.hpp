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
 * @file schedule.hpp
 *
 * @brief Radii schedule r_1 < R_1 < r_2 < ... and the spiral weight functions.
 *
 * Levels are 1-based throughout this header: level i owns the ramp
 * (r_i, R_i), and weights mu_1 .. mu_{m+1} exist for an m-level schedule.
 * All radii are held as natural logarithms; r_{m+1} is the coverage radius.
 *
 * The angle of level i is tau_i(t) = clamp(eps * ln(t / r_i), 0, pi/2), so
 * on the ramp t * tau_i'(t) = eps exactly and mu_i, mu_{i+1} trace a
 * logarithmic spiral.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace spiralglue {

//! Construction parameters: spiral speed eps, gap delta, bank budget gamma,
//! spreading slack zeta.
struct Params {
  double eps = 0.01;
  double delta = 0.01;
  double gamma = 0.01;
  double zeta = 0.01;

  //! eps, delta, zeta in (0,1); gamma in [0,1) so that exact-isometry banks
  //! can be run with a zero budget.
  void Validate() const {
    auto open_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
    detail::Require(open_unit(eps), ErrorKind::kInvalidArgument, "eps must lie in (0,1)");
    detail::Require(open_unit(delta), ErrorKind::kInvalidArgument, "delta must lie in (0,1)");
    detail::Require(open_unit(zeta), ErrorKind::kInvalidArgument, "zeta must lie in (0,1)");
    detail::Require(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0,
                    ErrorKind::kInvalidArgument, "gamma must lie in [0,1)");
  }

  Params Scaled(double s) const { return {eps * s, delta * s, gamma * s, zeta * s}; }
};

class RadiiSchedule {
 public:
  /**
   * Validates the ordering constraints: r_i < R_i, a ramp long enough for a
   * tau with slope at most eps/t, and R_{i-1}/delta <= r_i (equality is
   * allowed; the far-pair estimate only needs r_{i+1} < |x|).
   */
  static RadiiSchedule FromLogs(Params params, std::vector<double> log_r,
                                std::vector<double> log_big_r, double margin) {
    params.Validate();
    detail::Require(!log_r.empty() && log_r.size() == log_big_r.size(),
                    ErrorKind::kInvalidArgument,
                    "schedule needs the same positive number of r and R radii");
    detail::Require(std::isfinite(margin) && margin >= 0.0,
                    ErrorKind::kInvalidArgument, "margin must be nonnegative");
    const double gap = -std::log(params.delta);
    const double ramp = std::numbers::pi / 2.0;
    for (std::size_t k = 0; k < log_r.size(); ++k) {
      detail::Require(std::isfinite(log_r[k]) && std::isfinite(log_big_r[k]),
                      ErrorKind::kNonFinite, "schedule radius is not finite");
      detail::Require(log_r[k] < log_big_r[k], ErrorKind::kInvalidArgument,
                      "r_i must be below R_i at level " + std::to_string(k + 1));
      const double width = log_big_r[k] - log_r[k];
      detail::Require(params.eps * width >= ramp * (1.0 - 1e-12),
                      ErrorKind::kInvalidArgument,
                      "ramp too short for eps at level " + std::to_string(k + 1));
      if (k > 0) {
        const double step = log_r[k] - log_big_r[k - 1];
        detail::Require(step >= gap - 1e-12 * std::max(1.0, std::abs(log_r[k])),
                        ErrorKind::kInvalidArgument,
                        "r_i <= R_{i-1}/delta at level " + std::to_string(k + 1));
      }
    }
    const double cover = log_big_r.back() + gap + std::log1p(margin);
    log_r.push_back(cover);
    return RadiiSchedule(params, std::move(log_r), std::move(log_big_r), margin);
  }

  std::size_t levels() const noexcept { return log_big_r_.size(); }
  const Params &params() const noexcept { return params_; }
  double margin() const noexcept { return margin_; }

  //! ln r_i for i in 1..m+1; i = m+1 is the coverage radius.
  double log_r(std::size_t i) const {
    detail::Require(i >= 1 && i <= levels() + 1, ErrorKind::kInvalidArgument,
                    "r index out of range");
    return log_r_[i - 1];
  }

  //! ln R_i for i in 0..m, with R_0 = 0.
  double log_R(std::size_t i) const {
    detail::Require(i <= levels(), ErrorKind::kInvalidArgument,
                    "R index out of range");
    return i == 0 ? -std::numeric_limits<double>::infinity() : log_big_r_[i - 1];
  }

  double log_coverage() const noexcept { return log_r_.back(); }

  //! ln r_1..ln r_m (coverage excluded).
  std::vector<double> log_r_values() const {
    return {log_r_.begin(), log_r_.end() - 1};
  }
  const std::vector<double> &log_R_values() const noexcept { return log_big_r_; }

  //! Linear-domain radii; Overflow when exp() leaves the double range.
  double r(std::size_t i) const { return Linear(log_r(i), "r"); }
  double R(std::size_t i) const { return i == 0 ? 0.0 : Linear(log_R(i), "R"); }

 private:
  RadiiSchedule(Params params, std::vector<double> log_r,
                std::vector<double> log_big_r, double margin)
      : params_(params),
        log_r_(std::move(log_r)),
        log_big_r_(std::move(log_big_r)),
        margin_(margin) {}

  static double Linear(double log_value, const char *name) {
    const double v = std::exp(log_value);
    detail::Require(std::isfinite(v), ErrorKind::kOverflow,
                    std::string(name) + " radius exp(" + std::to_string(log_value) +
                        ") exceeds the floating range");
    return v;
  }

  Params params_;
  std::vector<double> log_r_;      // m + 1 entries, last is coverage
  std::vector<double> log_big_r_;  // m entries
  double margin_;
};

/**
 * Minimal schedule: R_i = r_i e^{pi/(2 eps)} and r_{i+1} = (R_i/delta)(1+margin).
 */
inline RadiiSchedule build_schedule(const Params &params, double r1,
                                    std::size_t levels, double margin = 0.01) {
  params.Validate();
  detail::Require(std::isfinite(r1) && r1 > 0.0, ErrorKind::kInvalidArgument,
                  "r1 must be positive");
  detail::Require(levels >= 1, ErrorKind::kInvalidArgument, "levels must be >= 1");
  detail::Require(std::isfinite(margin) && margin >= 0.0,
                  ErrorKind::kInvalidArgument, "margin must be nonnegative");
  const double ramp = std::numbers::pi / (2.0 * params.eps);
  const double gap = -std::log(params.delta) + std::log1p(margin);
  std::vector<double> log_r(levels), log_big_r(levels);
  log_r[0] = std::log(r1);
  for (std::size_t k = 0; k < levels; ++k) {
    if (k > 0) log_r[k] = log_big_r[k - 1] + gap;
    log_big_r[k] = log_r[k] + ramp;
  }
  return RadiiSchedule::FromLogs(params, std::move(log_r), std::move(log_big_r),
                                 margin);
}

//! (cos tau, sin tau) of one level, exactly (1,0) and (0,1) off the ramp.
struct SpiralCoefficients {
  double c;
  double s;
};

class WeightSystem {
 public:
  explicit WeightSystem(RadiiSchedule schedule) : schedule_(std::move(schedule)) {}

  const RadiiSchedule &schedule() const noexcept { return schedule_; }
  std::size_t levels() const noexcept { return schedule_.levels(); }
  double eps() const noexcept { return schedule_.params().eps; }

  double TauLog(std::size_t i, double log_t) const {
    RequireLevel(i);
    const double lr = schedule_.log_r(i);
    if (log_t <= lr) return 0.0;
    if (log_t >= schedule_.log_R(i)) return std::numbers::pi / 2.0;
    return std::min(eps() * (log_t - lr), std::numbers::pi / 2.0);
  }

  double tau(std::size_t i, double t) const { return TauLog(i, LogOf(t)); }

  SpiralCoefficients CoefficientsLog(std::size_t i, double log_t) const {
    RequireLevel(i);
    if (log_t <= schedule_.log_r(i)) return {1.0, 0.0};
    if (log_t >= schedule_.log_R(i)) return {0.0, 1.0};
    const double a = TauLog(i, log_t);
    return {std::cos(a), std::sin(a)};
  }

  /**
   * mu_i at ln t for i in 1..m+1. Plateaus are closed intervals; on shared
   * endpoints the neighbouring pieces agree exactly.
   */
  double MuLog(std::size_t i, double log_t) const {
    const std::size_t m = levels();
    detail::Require(i >= 1 && i <= m + 1, ErrorKind::kInvalidArgument,
                    "weight index out of range");
    RequireCovered(log_t);
    if (i == 1) {
      return log_t <= schedule_.log_R(1) ? CoefficientsLog(1, log_t).c : 0.0;
    }
    if (log_t < schedule_.log_r(i - 1)) return 0.0;
    if (log_t <= schedule_.log_R(i - 1) || i == m + 1) {
      return CoefficientsLog(i - 1, log_t).s;
    }
    if (log_t <= schedule_.log_r(i)) return 1.0;
    if (log_t <= schedule_.log_R(i)) return CoefficientsLog(i, log_t).c;
    return 0.0;
  }

  double mu(std::size_t i, double t) const { return MuLog(i, LogOf(t)); }

  //! mu_1 .. mu_{m+1} at ln t.
  std::vector<double> AllMuLog(double log_t) const {
    std::vector<double> out(levels() + 1);
    for (std::size_t i = 1; i <= out.size(); ++i) out[i - 1] = MuLog(i, log_t);
    return out;
  }

  void RequireCovered(double log_t) const {
    detail::Require(!(log_t > schedule_.log_coverage()),
                    ErrorKind::kOutOfScheduleRange,
                    "ln|x| = " + std::to_string(log_t) +
                        " exceeds schedule coverage ln r_{m+1} = " +
                        std::to_string(schedule_.log_coverage()));
  }

  static double LogOf(double t) {
    detail::Require(t >= 0.0, ErrorKind::kInvalidArgument, "t must be nonnegative");
    return t == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(t);
  }

 private:
  void RequireLevel(std::size_t i) const {
    detail::Require(i >= 1 && i <= levels(), ErrorKind::kInvalidArgument,
                    "level index out of range");
  }

  RadiiSchedule schedule_;
};

//! Worst observed slacks of the weight-system laws on a grid.
struct WeightCheckReport {
  std::size_t samples = 0;
  //! max of t tau_i'(t) - eps over ramp interiors; <= 0 analytically.
  double max_tau_slope_excess = -std::numeric_limits<double>::infinity();
  //! min of t tau_i'(t); must be >= 0 up to FD noise.
  double min_tau_slope = std::numeric_limits<double>::infinity();
  //! max of t (mu_i'^2 + mu_{i+1}'^2)^{1/2} - eps, scale free.
  double max_speed_excess = -std::numeric_limits<double>::infinity();
  //! same excess divided by t, i.e. the absolute derivative violation.
  double max_speed_excess_abs = -std::numeric_limits<double>::infinity();
  double max_partition_error = 0.0;
  std::size_t support_violations = 0;
  std::size_t plateau_violations = 0;
  std::size_t monotonicity_violations = 0;

  bool Passed(double tol = 1e-6) const {
    return max_tau_slope_excess <= tol && min_tau_slope >= -tol &&
           max_speed_excess <= tol && max_speed_excess_abs <= tol &&
           max_partition_error <= 1e-12 && support_violations == 0 &&
           plateau_violations == 0 && monotonicity_violations == 0;
  }
};

namespace detail {

inline std::vector<double> LinSpace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (k + 1 == n) ? b : a + (b - a) * static_cast<double>(k) / (n - 1);
  }
  return out;
}

// Whether weight j (1-based) may be nonzero at ln t.
inline bool InSupport(const RadiiSchedule &s, std::size_t j, double log_t) {
  const std::size_t m = s.levels();
  if (j == 1) return log_t <= s.log_R(1);
  if (j == m + 1) return log_t >= s.log_r(m);
  return log_t >= s.log_r(j - 1) && log_t <= s.log_R(j);
}

}  // namespace detail

//! Start of the default plotting / checking grid: one delta-gap below r_1.
inline double DefaultGridStart(const RadiiSchedule &s) {
  return s.log_r(1) + std::log(s.params().delta);
}

//! n log-spaced abscissae (as ln t) from DefaultGridStart to coverage.
inline std::vector<double> LogGrid(const RadiiSchedule &s, std::size_t n) {
  detail::Require(n >= 2, ErrorKind::kInvalidArgument, "grid needs >= 2 points");
  return detail::LinSpace(DefaultGridStart(s), s.log_coverage(), n);
}

/**
 * Left and right log-slopes d tau_i / d ln t at ln t (equal to t tau_i'(t)).
 * They differ at the kinks r_i and R_i.
 */
inline std::pair<double, double> OneSidedTauSlopes(const WeightSystem &ws,
                                                   std::size_t i, double log_t,
                                                   double step = 1e-6) {
  const double mid = ws.TauLog(i, log_t);
  return {(mid - ws.TauLog(i, log_t - step)) / step,
          (ws.TauLog(i, log_t + step) - mid) / step};
}

namespace detail {

inline void AccumulatePointLaws(const WeightSystem &ws, double log_t,
                                WeightCheckReport &rep) {
  const auto &s = ws.schedule();
  const auto mus = ws.AllMuLog(log_t);
  double sq = 0.0;
  for (std::size_t j = 1; j <= mus.size(); ++j) {
    sq += mus[j - 1] * mus[j - 1];
    if (!InSupport(s, j, log_t) && mus[j - 1] != 0.0) ++rep.support_violations;
    if (mus[j - 1] < 0.0 || mus[j - 1] > 1.0) ++rep.support_violations;
  }
  rep.max_partition_error = std::max(rep.max_partition_error, std::abs(sq - 1.0));
  // mu_1 = 1 on [0, r_1]; mu_i = 1 on [R_{i-1}, r_i]; mu_{m+1} = 1 past R_m.
  for (std::size_t i = 1; i <= s.levels() + 1; ++i) {
    const bool on_plateau =
        (i == s.levels() + 1)
            ? log_t >= s.log_R(i - 1)
            : (log_t >= s.log_R(i - 1) && log_t <= s.log_r(i));
    if (on_plateau && mus[i - 1] != 1.0) ++rep.plateau_violations;
  }
  ++rep.samples;
}

}  // namespace detail

/**
 * Checks every law of the weight system on a grid of ln t values: squares
 * summing to one, exact supports and plateaus, monotone ramps, and the slope
 * caps on tau and on the (mu_i, mu_{i+1}) speed via central differences in
 * ln t with step fd_step (a multiplicative step t * fd_step in t).
 */
inline WeightCheckReport CheckWeightLawsOnGrid(const WeightSystem &ws,
                                               const std::vector<double> &grid,
                                               double fd_step = 1e-6) {
  const auto &s = ws.schedule();
  WeightCheckReport rep;
  for (double lt : grid) detail::AccumulatePointLaws(ws, lt, rep);

  for (std::size_t i = 1; i <= s.levels(); ++i) {
    double prev_c = 2.0, prev_s = -1.0;
    for (double lt : grid) {
      if (lt < s.log_r(i) || lt > s.log_R(i)) continue;
      const double ci = ws.MuLog(i, lt);
      const double si = ws.MuLog(i + 1, lt);
      if (ci > prev_c || si < prev_s) ++rep.monotonicity_violations;
      prev_c = ci;
      prev_s = si;
      if (!(lt > s.log_r(i) && lt < s.log_R(i))) continue;
      if (lt + fd_step > s.log_coverage()) continue;
      const double dtau =
          (ws.TauLog(i, lt + fd_step) - ws.TauLog(i, lt - fd_step)) / (2 * fd_step);
      const double dmu_a =
          (ws.MuLog(i, lt + fd_step) - ws.MuLog(i, lt - fd_step)) / (2 * fd_step);
      const double dmu_b =
          (ws.MuLog(i + 1, lt + fd_step) - ws.MuLog(i + 1, lt - fd_step)) /
          (2 * fd_step);
      const double speed = std::hypot(dmu_a, dmu_b);
      rep.max_tau_slope_excess = std::max(rep.max_tau_slope_excess, dtau - ws.eps());
      rep.min_tau_slope = std::min(rep.min_tau_slope, dtau);
      const double excess = speed - ws.eps();
      rep.max_speed_excess = std::max(rep.max_speed_excess, excess);
      rep.max_speed_excess_abs =
          std::max(rep.max_speed_excess_abs, excess / std::exp(lt));
    }
  }
  return rep;
}

//! samples_per_interval points on every ramp and every plateau.
inline WeightCheckReport check_weight_conditions(const WeightSystem &ws,
                                                 std::size_t samples_per_interval) {
  detail::Require(samples_per_interval >= 2, ErrorKind::kInvalidArgument,
                  "need at least 2 samples per interval");
  const auto &s = ws.schedule();
  std::vector<double> grid;
  auto add = [&](double a, double b) {
    auto part = detail::LinSpace(a, b, samples_per_interval);
    grid.insert(grid.end(), part.begin(), part.end());
  };
  add(DefaultGridStart(s), s.log_r(1));
  for (std::size_t i = 1; i <= s.levels(); ++i) {
    add(s.log_r(i), s.log_R(i));
    add(s.log_R(i), s.log_r(i + 1));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return CheckWeightLawsOnGrid(ws, grid);
}

}  // namespace spiralglue
