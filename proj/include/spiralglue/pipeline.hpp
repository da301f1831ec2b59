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
 * @file pipeline.hpp
 *
 * @brief Run configuration and the full batch pipeline:
 * schedule -> points -> decomposition -> bank -> selection -> glue -> verify.
 *
 * Example configuration:
 * @code{.json}
 * {
 *   "source": {"dim": 3, "norm": "lp", "p": 1},
 *   "target": {"norm": "lp", "p": 1},
 *   "params": {"eps": 0.01, "delta": 0.01, "gamma": 0.01, "zeta": 0.01},
 *   "schedule": {"r1": 1.0, "levels": 3, "margin": 0.01},
 *   "points": {"generator": {"seed": 7, "per_level": 15, "placement": "mixed"}},
 *   "bank": {"strategy": "block_shift", "count": 6},
 *   "output": {"report": "report.json", "pairs": "pairs.csv"}
 * }
 * @endcode
 * "eps_target" may replace "params"; "points" may instead be
 * {"inline": [[...], ...]} or {"file": "points.json"}.
 */

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bank.hpp"
#include "glue.hpp"
#include "io.hpp"
#include "pointset.hpp"
#include "schedule.hpp"
#include "verify.hpp"

namespace spiralglue {

struct InlinePoints {
  std::vector<std::vector<double>> coords;
};
struct GeneratedPoints {
  std::uint64_t seed = 0;
  std::size_t per_level = 10;
  Placement placement = Placement::kMixed;
  std::optional<std::size_t> only_level;
};
struct PointsFile {
  std::string path;
};
using PointsSpec = std::variant<InlinePoints, GeneratedPoints, PointsFile>;

struct BankSpec {
  BankStrategy strategy = BlockShift{};
  std::size_t count = 0;
  std::size_t random_vectors = 64;
  std::uint64_t seed = 0;
};

struct RunConfig {
  io::Json raw;
  Space source = Space::Lp(1, 1.0);
  io::Json target;  // may omit dim; resolved from the bank strategy
  std::optional<Params> params;
  std::optional<double> eps_target;
  double r1 = 1.0;
  std::size_t levels = 3;
  double margin = 0.01;
  PointsSpec points = GeneratedPoints{};
  BankSpec bank;
  double tolerance = kSlackTolerance;
  std::size_t workers = 1;
  std::string report_path;
  std::string pairs_path;
  std::string images_path;
};

inline Placement PlacementFromString(const std::string &s) {
  if (s == "plateau") return Placement::kPlateau;
  if (s == "ramp") return Placement::kRamp;
  if (s == "mixed") return Placement::kMixed;
  throw Error(ErrorKind::kConfig, "unknown placement '" + s + "'");
}

inline std::string PlacementName(Placement p) {
  switch (p) {
    case Placement::kPlateau: return "plateau";
    case Placement::kRamp: return "ramp";
    case Placement::kMixed: return "mixed";
  }
  return "mixed";
}

inline BankSpec BankSpecFromJson(const io::Json &j) {
  using io::detail::Get;
  using io::detail::GetOr;
  BankSpec spec;
  const auto kind = Get<std::string>(j, "strategy");
  spec.count = GetOr<std::size_t>(j, "count", 0);
  spec.random_vectors = GetOr<std::size_t>(j, "random_vectors", 64);
  spec.seed = GetOr<std::uint64_t>(j, "seed", 0);
  if (kind == "block_shift") {
    spec.strategy = BlockShift{GetOr<std::size_t>(j, "block_width", 0)};
  } else if (kind == "quadrature_l2_l1") {
    spec.strategy = QuadratureL2toL1{GetOr<std::size_t>(j, "directions", 64), spec.seed};
  } else if (kind == "user_matrices") {
    UserMatrices um;
    for (const auto &m : Get<std::vector<std::vector<std::vector<double>>>>(j, "matrices")) {
      std::vector<double> flat;
      for (const auto &row : m) flat.insert(flat.end(), row.begin(), row.end());
      um.matrices.push_back(std::move(flat));
    }
    spec.strategy = std::move(um);
  } else {
    throw Error(ErrorKind::kConfig, "unknown bank strategy '" + kind + "'");
  }
  return spec;
}

inline RunConfig ParseRunConfig(const io::Json &j) {
  using io::detail::Get;
  using io::detail::GetOr;
  RunConfig cfg;
  cfg.raw = j;
  cfg.source = io::SpaceFromJson(j.at("source"));
  cfg.target = j.contains("target") ? j.at("target") : j.at("source");
  const bool has_params = j.contains("params");
  const bool has_target = j.contains("eps_target");
  if (has_params == has_target) {
    throw Error(ErrorKind::kConfig, "exactly one of 'params' and 'eps_target' is required");
  }
  if (has_params) cfg.params = io::ParamsFromJson(j.at("params"));
  if (has_target) cfg.eps_target = Get<double>(j, "eps_target");

  const io::Json sched = GetOr<io::Json>(j, "schedule", io::Json::object());
  cfg.r1 = GetOr<double>(sched, "r1", 1.0);
  cfg.levels = GetOr<std::size_t>(sched, "levels", 3);
  cfg.margin = GetOr<double>(sched, "margin", 0.01);

  const io::Json &pts = j.at("points");
  if (pts.contains("inline")) {
    cfg.points = InlinePoints{Get<std::vector<std::vector<double>>>(pts, "inline")};
  } else if (pts.contains("file")) {
    const auto path = Get<std::string>(pts, "file");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kConfig, "points file '" + path + "' does not exist");
    }
    cfg.points = PointsFile{path};
  } else if (pts.contains("generator")) {
    const io::Json &g = pts.at("generator");
    GeneratedPoints gp;
    gp.seed = GetOr<std::uint64_t>(g, "seed", 0);
    gp.per_level = GetOr<std::size_t>(g, "per_level", 10);
    gp.placement = PlacementFromString(GetOr<std::string>(g, "placement", "mixed"));
    if (g.contains("only_level")) gp.only_level = Get<std::size_t>(g, "only_level");
    cfg.points = gp;
  } else {
    throw Error(ErrorKind::kConfig, "points need one of 'inline', 'file', 'generator'");
  }

  cfg.bank = BankSpecFromJson(j.at("bank"));
  const io::Json ver = GetOr<io::Json>(j, "verify", io::Json::object());
  cfg.tolerance = GetOr<double>(ver, "tolerance", kSlackTolerance);
  cfg.workers = GetOr<std::size_t>(ver, "workers", 1);
  const io::Json out = GetOr<io::Json>(j, "output", io::Json::object());
  cfg.report_path = GetOr<std::string>(out, "report", "");
  cfg.pairs_path = GetOr<std::string>(out, "pairs", "");
  cfg.images_path = GetOr<std::string>(out, "images", "");
  return cfg;
}

inline io::Json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open '" + path + "'");
  try {
    return io::Json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kConfig, "'" + path + "': " + e.what());
  }
}

inline Params ResolveParams(const RunConfig &cfg) {
  return cfg.params ? *cfg.params : solve_params(*cfg.eps_target);
}

inline LocallyFiniteSet MaterializePoints(const RunConfig &cfg, const RadiiSchedule &sched) {
  return std::visit(
      [&](const auto &spec) -> LocallyFiniteSet {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, InlinePoints>) {
          std::vector<Point> pts;
          for (const auto &c : spec.coords) pts.emplace_back(c);
          return LocallyFiniteSet::FromPoints(cfg.source, std::move(pts));
        } else if constexpr (std::is_same_v<T, PointsFile>) {
          auto set = io::PointSetFromJson(ReadJsonFile(spec.path));
          if (!set.space().SameAs(cfg.source)) {
            throw Error(ErrorKind::kConfig, "points file space differs from the source space");
          }
          return set;
        } else {
          return generate_annular(spec.seed, sched, spec.per_level, cfg.source, spec.placement,
                                  spec.only_level);
        }
      },
      cfg.points);
}

//! Target dimension implied by the bank strategy when the config omits it.
inline std::size_t DefaultTargetDim(const BankSpec &spec, const Space &source) {
  return std::visit(
      [&](const auto &s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BlockShift>) {
          const std::size_t width = s.block_width ? s.block_width : source.dim();
          return spec.count * width;
        } else if constexpr (std::is_same_v<T, QuadratureL2toL1>) {
          return spec.count * s.directions;
        } else {
          if (s.matrices.empty()) return 0;
          return s.matrices.front().size() / source.dim();
        }
      },
      spec.strategy);
}

//! Nonzero points, their pairwise differences, every U_i direction and
//! seeded random unit vectors.
inline std::vector<Point> CertificationVectors(const LocallyFiniteSet &pts,
                                               const AnnulusDecomposition &decomp,
                                               std::size_t random_vectors, std::uint64_t seed) {
  std::vector<Point> out;
  const auto &pv = pts.points();
  for (std::size_t a = 0; a < pv.size(); ++a) {
    if (!pv[a].point.is_zero()) out.push_back(pv[a].point);
    for (std::size_t b = a + 1; b < pv.size(); ++b) out.push_back(pv[a].point - pv[b].point);
  }
  for (const auto &lvl : decomp.levels)
    for (const auto &d : lvl.directions) out.push_back(d.u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Space &space = pts.space();
  for (std::size_t k = 0; k < random_vectors; ++k) {
    std::vector<double> g(space.dim());
    for (auto &v : g) v = gauss(rng);
    const double n = space.Norm(g);
    if (n == 0.0) continue;
    for (auto &v : g) v /= n;
    out.emplace_back(std::move(g));
  }
  if (out.empty()) out.push_back(Point::Zeros(space.dim()));
  return out;
}

struct RunResult {
  io::Json report;   // deterministic content
  io::Json timings;  // wall-clock seconds per stage
  LocallyFiniteSet points;
  std::optional<GlueEmbedding> glue;
  DistortionReport distortion;

  bool ok() const { return distortion.ok(); }
};

/**
 * Runs every stage. Construction failures (CertificationFailed, BankExhausted,
 * OutOfScheduleRange, ...) propagate as exceptions; inequality violations are
 * recorded in the report and reflected by ok().
 */
inline RunResult RunPipeline(const RunConfig &cfg) {
  using Clock = std::chrono::steady_clock;
  io::Json timings = io::Json::object();
  auto stage = [&](const char *name, auto &&fn) {
    const auto t0 = Clock::now();
    auto out = fn();
    timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
  };

  const Params params = stage("params", [&] { return ResolveParams(cfg); });
  const RadiiSchedule sched =
      stage("schedule", [&] { return build_schedule(params, cfg.r1, cfg.levels, cfg.margin); });
  LocallyFiniteSet points = stage("points", [&] { return MaterializePoints(cfg, sched); });
  const AnnulusDecomposition decomp = stage("decompose", [&] { return decompose(points, sched); });

  const Space target = io::SpaceFromJson(cfg.target, DefaultTargetDim(cfg.bank, cfg.source));
  EmbeddingBank bank = stage("bank", [&] {
    const auto certify =
        CertificationVectors(points, decomp, cfg.bank.random_vectors, cfg.bank.seed);
    return build_bank(cfg.bank.strategy, cfg.source, target, params.gamma, cfg.bank.count,
                      certify);
  });
  SelectionResult selection =
      stage("selection", [&] { return select_subsequence(bank, decomp, params.zeta); });

  io::Json report;
  report["config"] = cfg.raw;
  report["params"] = io::ParamsToJson(params);
  report["schedule"] = io::ScheduleToJson(sched);
  report["points"] = {{"count", points.size()}, {"includes_origin", points.includes_origin()}};
  io::Json levels = io::Json::array();
  for (const auto &lvl : decomp.levels) {
    std::size_t angles = 0;
    for (const auto &d : lvl.directions) angles += d.angles.size();
    levels.push_back({{"level", lvl.level},
                      {"members", lvl.members.size()},
                      {"directions", lvl.directions.size()},
                      {"angles", angles}});
  }
  report["decomposition"] = std::move(levels);
  report["bank"] = io::CertificatesToJson(bank);
  report["selection"] = io::SelectionToJson(selection);

  GlueEmbedding glue =
      GlueEmbedding::Make(WeightSystem(sched), std::move(bank), std::move(selection));
  DistortionReport dist = stage("verify", [&] {
    return analyze(glue, points, AnalyzeOptions{cfg.tolerance, cfg.workers});
  });
  report["distortion"] = io::ReportToJson(dist);
  report["status"] = dist.ok() ? "ok" : "bound_violated";

  return RunResult{std::move(report), std::move(timings), std::move(points), std::move(glue),
                   std::move(dist)};
}

}  // namespace spiralglue
