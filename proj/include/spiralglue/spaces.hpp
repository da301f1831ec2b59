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
 * @file spaces.hpp
 *
 * @brief Finite-dimensional real normed spaces, points and dense linear maps.
 *
 * Norm evaluation is scaled by the largest weighted coordinate so that
 * points with very large coordinates (the radii schedule spans hundreds of
 * orders of magnitude) never overflow in the p-power sums.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"

namespace spiralglue {

//! A point of a finite-dimensional real space. Coordinates are always finite.
class Point {
 public:
  Point() = default;

  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_) {
      detail::Require(std::isfinite(c), ErrorKind::kNonFinite,
                      "point coordinate is not finite");
    }
  }

  Point(std::initializer_list<double> coords)
      : Point(std::vector<double>(coords)) {}

  static Point Zeros(std::size_t dim) {
    return Point(std::vector<double>(dim, 0.0));
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  bool is_zero() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](double c) { return c == 0.0; });
  }

  friend bool operator==(const Point &, const Point &) = default;

 private:
  std::vector<double> coords_;
};

namespace detail {

inline void RequireSameDim(const Point &a, const Point &b) {
  Require(a.dim() == b.dim(), ErrorKind::kDimensionMismatch,
          "points of dimension " + std::to_string(a.dim()) + " and " +
              std::to_string(b.dim()));
}

}  // namespace detail

inline Point operator+(const Point &a, const Point &b) {
  detail::RequireSameDim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Point(std::move(out));
}

inline Point operator-(const Point &a, const Point &b) {
  detail::RequireSameDim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return Point(std::move(out));
}

inline Point operator*(double s, const Point &a) {
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
  return Point(std::move(out));
}

/**
 * @brief Exponent p of an l_p norm, with infinity as an explicit state
 * rather than a large float.
 */
class LpExponent {
 public:
  static LpExponent Finite(double p) {
    detail::Require(std::isfinite(p) && p >= 1.0, ErrorKind::kInvalidArgument,
                    "l_p exponent must lie in [1, inf)");
    return LpExponent(p, false);
  }
  static LpExponent Infinity() { return LpExponent(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }
  //! Only meaningful when finite.
  double value() const noexcept { return p_; }

  friend bool operator==(const LpExponent &, const LpExponent &) = default;

 private:
  LpExponent(double p, bool inf) : p_(p), infinite_(inf) {}
  double p_;
  bool infinite_;
};

struct LpNorm {
  LpExponent p;
};

//! (sum_i |w_i x_i|^p)^{1/p}, weights strictly positive.
struct WeightedLpNorm {
  LpExponent p;
  std::vector<double> weights;
};

//! max_k |<f_k, x>| for functionals spanning the dual.
struct MaxAbsFunctionalsNorm {
  std::vector<std::vector<double>> functionals;
};

using NormSpec = std::variant<LpNorm, WeightedLpNorm, MaxAbsFunctionalsNorm>;

namespace detail {

// Scaled l_p sum over |w_i x_i|. p = 1 is summed directly so that disjoint
// supports add exactly.
inline double LpValue(const LpExponent &p, std::span<const double> x,
                      const double *weights) {
  auto term = [&](std::size_t i) {
    return weights ? std::abs(weights[i] * x[i]) : std::abs(x[i]);
  };
  double peak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) peak = std::max(peak, term(i));
  if (p.is_infinite() || peak == 0.0) return peak;
  const double pv = p.value();
  if (pv == 1.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += term(i);
    return sum;
  }
  double sum = 0.0;
  if (pv == 2.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = term(i) / peak;
      sum += r * r;
    }
    return peak * std::sqrt(sum);
  }
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::pow(term(i) / peak, pv);
  return peak * std::pow(sum, 1.0 / pv);
}

// Rank of a row set by Gaussian elimination with partial pivoting.
inline std::size_t Rank(std::vector<std::vector<double>> rows, std::size_t dim) {
  double scale = 0.0;
  for (const auto &r : rows)
    for (double v : r) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0;
  const double tol = 1e-12 * scale;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < dim && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (std::abs(rows[r][col]) > std::abs(rows[pivot][col])) pivot = r;
    if (std::abs(rows[pivot][col]) <= tol) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < dim; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

//! A real vector space R^dim with one of the supported norms.
class Space {
 public:
  static Space Make(std::size_t dim, NormSpec norm) {
    detail::Require(dim >= 1, ErrorKind::kInvalidArgument,
                    "space dimension must be positive");
    if (const auto *w = std::get_if<WeightedLpNorm>(&norm)) {
      detail::Require(w->weights.size() == dim, ErrorKind::kDimensionMismatch,
                      "weighted l_p needs one weight per coordinate");
      for (double v : w->weights) {
        detail::Require(std::isfinite(v) && v > 0.0,
                        ErrorKind::kInvalidArgument,
                        "weighted l_p weights must be positive and finite");
      }
    } else if (const auto *f = std::get_if<MaxAbsFunctionalsNorm>(&norm)) {
      for (const auto &row : f->functionals) {
        detail::Require(row.size() == dim, ErrorKind::kDimensionMismatch,
                        "functional length differs from space dimension");
        for (double v : row) {
          detail::Require(std::isfinite(v), ErrorKind::kNonFinite,
                          "functional coefficient is not finite");
        }
      }
      detail::Require(detail::Rank(f->functionals, dim) == dim,
                      ErrorKind::kInvalidArgument,
                      "functionals do not span the space");
    }
    return Space(dim, std::move(norm));
  }

  static Space Lp(std::size_t dim, double p) {
    return Make(dim, LpNorm{LpExponent::Finite(p)});
  }
  static Space LInf(std::size_t dim) {
    return Make(dim, LpNorm{LpExponent::Infinity()});
  }

  std::size_t dim() const noexcept { return dim_; }
  const NormSpec &norm() const noexcept { return norm_; }

  double Norm(std::span<const double> x) const {
    detail::Require(x.size() == dim_, ErrorKind::kDimensionMismatch,
                    "vector of length " + std::to_string(x.size()) +
                        " in space of dimension " + std::to_string(dim_));
    return std::visit(
        [&](const auto &n) -> double {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LpNorm>) {
            return detail::LpValue(n.p, x, nullptr);
          } else if constexpr (std::is_same_v<T, WeightedLpNorm>) {
            return detail::LpValue(n.p, x, n.weights.data());
          } else {
            double best = 0.0;
            for (const auto &f : n.functionals) {
              double s = 0.0;
              for (std::size_t i = 0; i < dim_; ++i) s += f[i] * x[i];
              best = std::max(best, std::abs(s));
            }
            return best;
          }
        },
        norm_);
  }

  //! True when both spaces carry the same dimension and norm description.
  bool SameAs(const Space &other) const;

 private:
  Space(std::size_t dim, NormSpec norm) : dim_(dim), norm_(std::move(norm)) {}
  std::size_t dim_;
  NormSpec norm_;
};

inline bool operator==(const LpNorm &a, const LpNorm &b) { return a.p == b.p; }
inline bool operator==(const WeightedLpNorm &a, const WeightedLpNorm &b) {
  return a.p == b.p && a.weights == b.weights;
}
inline bool operator==(const MaxAbsFunctionalsNorm &a,
                       const MaxAbsFunctionalsNorm &b) {
  return a.functionals == b.functionals;
}

inline bool Space::SameAs(const Space &other) const {
  return dim_ == other.dim_ && norm_ == other.norm_;
}

inline double norm(const Space &space, const Point &x) {
  return space.Norm(x.coords());
}

/**
 * @brief Dense linear map between two spaces, stored row-major with shape
 * (target.dim x source.dim).
 */
class LinearMap {
 public:
  static LinearMap Make(Space source, Space target, std::vector<double> data) {
    detail::Require(data.size() == source.dim() * target.dim(),
                    ErrorKind::kDimensionMismatch,
                    "matrix has " + std::to_string(data.size()) +
                        " entries, expected " +
                        std::to_string(source.dim() * target.dim()));
    for (double v : data) {
      detail::Require(std::isfinite(v), ErrorKind::kNonFinite,
                      "matrix entry is not finite");
    }
    return LinearMap(std::move(source), std::move(target), std::move(data));
  }

  static LinearMap FromRows(Space source, Space target,
                            const std::vector<std::vector<double>> &rows) {
    detail::Require(rows.size() == target.dim(), ErrorKind::kDimensionMismatch,
                    "row count differs from target dimension");
    std::vector<double> data;
    data.reserve(source.dim() * target.dim());
    for (const auto &r : rows) {
      detail::Require(r.size() == source.dim(), ErrorKind::kDimensionMismatch,
                      "row length differs from source dimension");
      data.insert(data.end(), r.begin(), r.end());
    }
    return Make(std::move(source), std::move(target), std::move(data));
  }

  static LinearMap Identity(const Space &space) {
    std::vector<double> data(space.dim() * space.dim(), 0.0);
    for (std::size_t i = 0; i < space.dim(); ++i) data[i * space.dim() + i] = 1.0;
    return Make(space, space, std::move(data));
  }

  const Space &source() const noexcept { return source_; }
  const Space &target() const noexcept { return target_; }
  std::size_t rows() const noexcept { return target_.dim(); }
  std::size_t cols() const noexcept { return source_.dim(); }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }
  std::span<const double> data() const noexcept { return data_; }

 private:
  LinearMap(Space source, Space target, std::vector<double> data)
      : source_(std::move(source)),
        target_(std::move(target)),
        data_(std::move(data)) {}

  Space source_;
  Space target_;
  std::vector<double> data_;
};

inline Point apply(const LinearMap &map, const Point &x) {
  detail::Require(x.dim() == map.cols(), ErrorKind::kDimensionMismatch,
                  "point of dimension " + std::to_string(x.dim()) +
                      " applied to map with source dimension " +
                      std::to_string(map.cols()));
  std::vector<double> out(map.rows(), 0.0);
  const auto data = map.data();
  for (std::size_t r = 0; r < map.rows(); ++r) {
    double s = 0.0;
    const double *row = data.data() + r * map.cols();
    for (std::size_t c = 0; c < map.cols(); ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return Point(std::move(out));
}

/**
 * @brief cos(theta) E + sin(theta) F materialized as a matrix.
 *
 * Agreement with cos(theta) E x + sin(theta) F x is up to rounding, since the
 * summation order differs; callers that need the two-term value bit-exactly
 * use SpiralCombine on the images instead.
 */
inline LinearMap combine(double theta, const LinearMap &e, const LinearMap &f) {
  detail::Require(e.rows() == f.rows() && e.cols() == f.cols() &&
                      e.source().SameAs(f.source()) &&
                      e.target().SameAs(f.target()),
                  ErrorKind::kDimensionMismatch,
                  "combined maps must share source and target");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> data(e.data().size());
  for (std::size_t k = 0; k < data.size(); ++k)
    data[k] = c * e.data()[k] + s * f.data()[k];
  return LinearMap::Make(e.source(), e.target(), std::move(data));
}

//! c * a + s * b coordinatewise, the single arithmetic path for two-term sums.
inline Point SpiralCombine(double c, const Point &a, double s, const Point &b) {
  detail::RequireSameDim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a[i] + s * b[i];
  return Point(std::move(out));
}

}  // namespace spiralglue
