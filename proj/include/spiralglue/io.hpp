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

// JSON and CSV formats. Spaces are flat objects {"dim", "norm", ...}:
//   {"dim": 3, "norm": "lp", "p": 1.0}        p may be the string "inf"
//   {"dim": 2, "norm": "weighted_lp", "p": 2, "weights": [1, 3]}
//   {"dim": 2, "norm": "max_abs", "functionals": [[1, 0], [1, 1]]}
// A point set is a space object with "points" (and optional "ids").

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bank.hpp"
#include "error.hpp"
#include "pointset.hpp"
#include "schedule.hpp"
#include "spaces.hpp"
#include "verify.hpp"

namespace spiralglue::io {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void ConfigFail(const std::string &what) {
  throw Error(ErrorKind::kConfig, what);
}

template <typename T>
T Get(const Json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) ConfigFail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    ConfigFail(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T GetOr(const Json &j, const char *key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return Get<T>(j, key);
}

// null for non-finite values so that the output stays valid JSON.
inline Json Num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json ExponentToJson(const LpExponent &p) {
  return p.is_infinite() ? Json("inf") : Json(p.value());
}

inline LpExponent ExponentFromJson(const Json &j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return LpExponent::Infinity();
    ConfigFail("p must be a number or \"inf\"");
  }
  if (!j.is_number()) ConfigFail("p must be a number or \"inf\"");
  return LpExponent::Finite(j.get<double>());
}

}  // namespace detail

inline Json NormToJson(const NormSpec &n) {
  return std::visit(
      [](const auto &v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LpNorm>) {
          return {{"norm", "lp"}, {"p", detail::ExponentToJson(v.p)}};
        } else if constexpr (std::is_same_v<T, WeightedLpNorm>) {
          return {{"norm", "weighted_lp"}, {"p", detail::ExponentToJson(v.p)}, {"weights", v.weights}};
        } else {
          return {{"norm", "max_abs"}, {"functionals", v.functionals}};
        }
      },
      n);
}

inline NormSpec NormFromJson(const Json &j) {
  const auto kind = detail::Get<std::string>(j, "norm");
  if (kind == "lp") return LpNorm{detail::ExponentFromJson(j.at("p"))};
  if (kind == "weighted_lp") {
    if (!j.contains("p")) detail::ConfigFail("missing field 'p'");
    return WeightedLpNorm{detail::ExponentFromJson(j.at("p")),
                          detail::Get<std::vector<double>>(j, "weights")};
  }
  if (kind == "max_abs") {
    return MaxAbsFunctionalsNorm{detail::Get<std::vector<std::vector<double>>>(j, "functionals")};
  }
  detail::ConfigFail("unknown norm '" + kind + "'");
}

inline Json SpaceToJson(const Space &s) {
  Json j = NormToJson(s.norm());
  j["dim"] = s.dim();
  return j;
}

//! dim may be omitted in the JSON when fallback_dim is given.
inline Space SpaceFromJson(const Json &j, std::size_t fallback_dim = 0) {
  const auto dim = detail::GetOr<std::size_t>(j, "dim", fallback_dim);
  if (dim == 0) detail::ConfigFail("space needs a positive 'dim'");
  return Space::Make(dim, NormFromJson(j));
}

inline Json ParamsToJson(const Params &p) {
  return {{"eps", p.eps}, {"delta", p.delta}, {"gamma", p.gamma}, {"zeta", p.zeta}};
}

inline Params ParamsFromJson(const Json &j) {
  Params p{detail::Get<double>(j, "eps"), detail::Get<double>(j, "delta"),
           detail::Get<double>(j, "gamma"), detail::Get<double>(j, "zeta")};
  p.Validate();
  return p;
}

inline Json ScheduleToJson(const RadiiSchedule &s) {
  return {{"levels", s.levels()},
          {"eps", s.params().eps},
          {"delta", s.params().delta},
          {"margin", s.margin()},
          {"log_r", s.log_r_values()},
          {"log_R", s.log_R_values()},
          {"log_coverage", s.log_coverage()}};
}

inline Json PointSetToJson(const LocallyFiniteSet &pts) {
  Json j = SpaceToJson(pts.space());
  Json points = Json::array();
  Json ids = Json::array();
  for (const auto &p : pts.points()) {
    points.push_back(std::vector<double>(p.point.coords().begin(), p.point.coords().end()));
    ids.push_back(p.id);
  }
  j["points"] = std::move(points);
  j["ids"] = std::move(ids);
  return j;
}

inline LocallyFiniteSet PointSetFromJson(const Json &j) {
  const Space space = SpaceFromJson(j);
  const auto coords = detail::Get<std::vector<std::vector<double>>>(j, "points");
  std::vector<LabeledPoint> pts;
  const bool has_ids = j.contains("ids");
  const auto ids = has_ids ? detail::Get<std::vector<std::int64_t>>(j, "ids")
                           : std::vector<std::int64_t>{};
  if (has_ids && ids.size() != coords.size()) detail::ConfigFail("ids and points differ in length");
  for (std::size_t k = 0; k < coords.size(); ++k) {
    pts.push_back({has_ids ? ids[k] : static_cast<std::int64_t>(k), Point(coords[k])});
  }
  return LocallyFiniteSet::Make(space, std::move(pts));
}

inline Json CertificatesToJson(const EmbeddingBank &bank) {
  Json certs = Json::array();
  for (std::size_t n = 0; n < bank.size(); ++n) {
    certs.push_back({{"index", n},
                     {"eps_n", bank.eps_n[n]},
                     {"min_ratio", detail::Num(bank.certificates[n].min_ratio)},
                     {"max_ratio", detail::Num(bank.certificates[n].max_ratio)}});
  }
  return {{"count", bank.size()},
          {"gamma", bank.gamma},
          {"budget_product", bank.BudgetProduct()},
          {"certified_vectors", bank.certified_vectors},
          {"maps", std::move(certs)}};
}

inline Json SelectionToJson(const SelectionResult &sel) {
  Json levels = Json::array();
  for (const auto &lm : sel.levels) {
    levels.push_back({{"level", lm.level},
                      {"checks", lm.checks},
                      {"worst_margin", detail::Num(lm.worst_margin)},
                      {"worst_norm", detail::Num(lm.worst_norm)},
                      {"worst_angle", lm.checks ? Json(lm.worst_angle) : Json(nullptr)}});
  }
  return {{"threshold", sel.threshold}, {"chosen", sel.chosen}, {"levels", std::move(levels)}};
}

inline Json BoundsToJson(const TheoreticalBounds &b) {
  return {{"L_same", b.L_same}, {"U_same", b.U_same}, {"L_ray", b.L_ray},
          {"U_ray", b.U_ray},   {"L_far", b.L_far},   {"U_far", b.U_far},
          {"ratio", b.ratio}};
}

inline std::string ClassName(const PairClass &c) {
  if (c.kind == PairKind::kSameLevel) return "same:" + std::to_string(c.level);
  return "far:" + std::to_string(c.level) + ":" + std::to_string(c.far_level);
}

inline Json ReportToJson(const DistortionReport &r) {
  auto summaries = [](const std::map<std::string, SlackSummary> &m) {
    Json out = Json::object();
    for (const auto &[name, s] : m) {
      out[name] = {{"count", s.count},
                   {"min_ratio", detail::Num(s.min_ratio)},
                   {"max_ratio", detail::Num(s.max_ratio)},
                   {"worst_lower_slack", detail::Num(s.worst_lower_slack)},
                   {"worst_upper_slack", detail::Num(s.worst_upper_slack)}};
    }
    return out;
  };
  Json violations = Json::array();
  for (const auto &v : r.violations) {
    violations.push_back({{"x_id", v.x_id}, {"y_id", v.y_id}, {"which", v.which}, {"slack", v.slack}});
  }
  return {{"pair_count", r.pair_count},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio},
          {"distortion", r.distortion},
          {"min_witness", {r.min_witness.first, r.min_witness.second}},
          {"max_witness", {r.max_witness.first, r.max_witness.second}},
          {"bounds", BoundsToJson(r.bounds)},
          {"within_bound", r.distortion <= r.bounds.ratio + r.tolerance},
          {"tolerance", r.tolerance},
          {"by_bracket", summaries(r.by_bracket)},
          {"by_check", summaries(r.by_check)},
          {"violations", std::move(violations)}};
}

namespace detail {

inline std::string Full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

//! Header: x_id,y_id,class,ratio,lower_slack,upper_slack
inline void WritePairsCsv(std::ostream &os, const DistortionReport &r) {
  os << "x_id,y_id,class,ratio,lower_slack,upper_slack\n";
  for (const auto &pc : r.pairs) {
    os << pc.x_id << ',' << pc.y_id << ',' << ClassName(pc.cls) << ','
       << detail::Full(pc.ratio) << ',' << detail::Full(pc.lower_slack) << ','
       << detail::Full(pc.upper_slack) << '\n';
  }
}

//! Header: t,mu_1,...,mu_{m+1}; grid_size points log-spaced over the schedule.
inline void WriteWeightsCsv(std::ostream &os, const WeightSystem &ws, std::size_t grid_size) {
  const auto grid = LogGrid(ws.schedule(), grid_size);
  for (double lt : grid) {
    ::spiralglue::detail::Require(std::isfinite(std::exp(lt)), ErrorKind::kOverflow,
                                  "grid abscissa exp(" + std::to_string(lt) +
                                      ") exceeds the floating range");
  }
  os << "t";
  for (std::size_t i = 1; i <= ws.levels() + 1; ++i) os << ",mu_" << i;
  os << '\n';
  for (double lt : grid) {
    os << detail::Full(std::exp(lt));
    for (double mu : ws.AllMuLog(lt)) os << ',' << detail::Full(mu);
    os << '\n';
  }
}

//! Header: id,c_0,...,c_{D-1} for target coordinates.
template <typename Images>
void WriteImagesCsv(std::ostream &os, const Images &images, std::size_t target_dim) {
  os << "id";
  for (std::size_t c = 0; c < target_dim; ++c) os << ",c_" << c;
  os << '\n';
  for (const auto &[id, p] : images) {
    os << id;
    for (double v : p.coords()) os << ',' << detail::Full(v);
    os << '\n';
  }
}

}  // namespace spiralglue::io
