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
 * @file glue.hpp
 *
 * @brief The glued embedding Psi(x) = sum_i mu_i(|x|) Psi_i(x), its two-term
 * level map T_i(x) = cos(tau_i(|x|)) Psi_i x + sin(tau_i(|x|)) Psi_{i+1} x,
 * and g(theta, u) = |cos(theta) E u + sin(theta) F u|.
 */

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bank.hpp"
#include "error.hpp"
#include "schedule.hpp"
#include "spaces.hpp"

namespace spiralglue {

class GlueEmbedding {
 public:
  static GlueEmbedding Make(WeightSystem ws, EmbeddingBank bank, SelectionResult selection) {
    const std::size_t m = ws.levels();
    detail::Require(selection.chosen.size() == m + 1, ErrorKind::kInvalidArgument,
                    "selection must name levels + 1 maps");
    detail::Require(bank.gamma <= ws.schedule().params().gamma, ErrorKind::kInvalidArgument,
                    "bank budget gamma exceeds the schedule gamma");
    for (std::size_t k = 0; k < selection.chosen.size(); ++k) {
      detail::Require(selection.chosen[k] < bank.size(), ErrorKind::kInvalidArgument,
                      "selected index outside the bank");
      detail::Require(k == 0 || selection.chosen[k] > selection.chosen[k - 1],
                      ErrorKind::kInvalidArgument, "selected indices must increase");
    }
    return GlueEmbedding(std::move(ws), std::move(bank), std::move(selection));
  }

  const WeightSystem &weights() const noexcept { return ws_; }
  const RadiiSchedule &schedule() const noexcept { return ws_.schedule(); }
  const EmbeddingBank &bank() const noexcept { return bank_; }
  const SelectionResult &selection() const noexcept { return selection_; }
  const Space &source() const { return bank_.source(); }
  const Space &target() const { return bank_.target(); }
  std::size_t levels() const noexcept { return ws_.levels(); }

  //! Psi_i for i in 1..m+1.
  const LinearMap &level_map(std::size_t i) const {
    detail::Require(i >= 1 && i <= levels() + 1, ErrorKind::kInvalidArgument,
                    "level map index out of range");
    return bank_.maps[selection_.chosen[i - 1]];
  }

  double LogNormOf(const Point &x) const {
    return WeightSystem::LogOf(norm(source(), x));
  }

  //! T_i(x) for the level pair (Psi_i, Psi_{i+1}).
  Point t_map(std::size_t level, const Point &x) const {
    const double lt = LogNormOf(x);
    ws_.RequireCovered(lt);
    const auto k = ws_.CoefficientsLog(level, lt);
    return SpiralCombine(k.c, apply(level_map(level), x), k.s,
                         apply(level_map(level + 1), x));
  }

  /**
   * Psi(x): on a plateau [R_{i-1}, r_i] (closed) the single map Psi_i, on a
   * ramp (r_i, R_i) the level map T_i. Psi(0) = 0.
   */
  Point evaluate(const Point &x) const {
    if (x.is_zero()) return Point::Zeros(target().dim());
    const double lt = LogNormOf(x);
    ws_.RequireCovered(lt);
    const auto &s = schedule();
    for (std::size_t i = 1; i <= levels(); ++i) {
      if (lt <= s.log_r(i)) return apply(level_map(i), x);
      if (lt < s.log_R(i)) return t_map(i, x);
    }
    return apply(level_map(levels() + 1), x);
  }

 private:
  GlueEmbedding(WeightSystem ws, EmbeddingBank bank, SelectionResult selection)
      : ws_(std::move(ws)), bank_(std::move(bank)), selection_(std::move(selection)) {}

  WeightSystem ws_;
  EmbeddingBank bank_;
  SelectionResult selection_;
};

inline Point evaluate(const GlueEmbedding &g, const Point &x) { return g.evaluate(x); }

inline Point t_map(const GlueEmbedding &g, std::size_t level, const Point &x) {
  return g.t_map(level, x);
}

//! |cos(theta) E u + sin(theta) F u| for a unit vector u.
inline double g_value(double theta, const Point &u, const LinearMap &e, const LinearMap &f) {
  detail::Require(e.rows() == f.rows() && e.cols() == f.cols(),
                  ErrorKind::kDimensionMismatch, "E and F must have the same shape");
  const double nu = norm(e.source(), u);
  detail::Require(std::abs(nu - 1.0) <= 1e-12, ErrorKind::kInvalidArgument,
                  "g needs a unit vector, got norm " + std::to_string(nu));
  return norm(e.target(),
              SpiralCombine(std::cos(theta), apply(e, u), std::sin(theta), apply(f, u)));
}

}  // namespace spiralglue
