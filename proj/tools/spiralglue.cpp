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

// spiralglue command line: bounds, run, theory, weights, gen-points.
//
// Exit codes: 0 ok, 1 numeric failure, 2 bad input, 3 bound violated,
// 4 bank exhausted, 5 certification failed.

#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spiralglue/spiralglue.hpp"

namespace sg = spiralglue;
using sg::io::Json;

namespace {

int ExitCodeFor(sg::ErrorKind kind) {
  switch (kind) {
    case sg::ErrorKind::kBoundViolated: return 3;
    case sg::ErrorKind::kBankExhausted: return 4;
    case sg::ErrorKind::kCertificationFailed: return 5;
    case sg::ErrorKind::kConfig:
    case sg::ErrorKind::kInvalidArgument:
    case sg::ErrorKind::kDimensionMismatch:
    case sg::ErrorKind::kNonPositiveLowerBound:
      return 2;
    default: return 1;
  }
}

void WriteText(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw sg::Error(sg::ErrorKind::kConfig, "cannot write '" + path + "'");
  out << text;
}

template <typename Fn>
void WriteStream(const std::string &path, Fn &&fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw sg::Error(sg::ErrorKind::kConfig, "cannot write '" + path + "'");
  fn(out);
}

struct ParamFlags {
  double eps = 0.01, delta = 0.01, gamma = 0.01, zeta = 0.01;

  void Attach(CLI::App *app) {
    app->add_option("--eps", eps, "ramp slope bound")->capture_default_str();
    app->add_option("--delta", delta, "far-pair ratio")->capture_default_str();
    app->add_option("--gamma", gamma, "bank budget")->capture_default_str();
    app->add_option("--zeta", zeta, "selection slack")->capture_default_str();
  }
  sg::Params Get() const {
    sg::Params p{eps, delta, gamma, zeta};
    p.Validate();
    return p;
  }
};

int CmdBounds(const ParamFlags &flags, const std::optional<double> &target) {
  const sg::Params p = target ? sg::solve_params(*target) : flags.Get();
  Json out;
  out["params"] = sg::io::ParamsToJson(p);
  const auto b = sg::theoretical_bounds(p);
  out["bounds"] = sg::io::BoundsToJson(b);
  if (target) {
    const double scale = std::sqrt(1.0 + *target / 3.0);
    out["target"] = {{"eps_target", *target},
                     {"lower_goal", std::numbers::sqrt2 / (3.0 * scale)},
                     {"upper_goal", std::numbers::sqrt2 * scale},
                     {"ratio_goal", 3.0 + *target}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

struct RunFlags {
  std::string config;
  std::string out;
  std::string pairs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<double> tolerance;
};

int CmdRun(const RunFlags &f) {
  Json raw = sg::ReadJsonFile(f.config);
  if (f.seed) {
    if (raw.contains("points") && raw["points"].contains("generator"))
      raw["points"]["generator"]["seed"] = *f.seed;
    if (raw.contains("bank")) raw["bank"]["seed"] = *f.seed;
  }
  if (f.workers) raw["verify"]["workers"] = *f.workers;
  if (f.tolerance) raw["verify"]["tolerance"] = *f.tolerance;
  sg::RunConfig cfg = sg::ParseRunConfig(raw);
  if (!f.out.empty()) cfg.report_path = f.out;
  if (!f.pairs.empty()) cfg.pairs_path = f.pairs;
  if (cfg.pairs_path.empty() && !cfg.report_path.empty() && cfg.report_path != "-")
    cfg.pairs_path = std::filesystem::path(cfg.report_path).replace_extension(".pairs.csv").string();

  sg::RunResult res = sg::RunPipeline(cfg);
  Json report = res.report;
  report["timings"] = res.timings;
  WriteText(cfg.report_path, report.dump(2) + "\n");
  if (!cfg.pairs_path.empty())
    WriteStream(cfg.pairs_path, [&](std::ostream &os) { sg::io::WritePairsCsv(os, res.distortion); });
  if (!cfg.images_path.empty()) {
    std::vector<std::pair<std::int64_t, sg::Point>> images;
    for (const auto &p : res.points.points()) images.emplace_back(p.id, res.glue->evaluate(p.point));
    WriteStream(cfg.images_path, [&](std::ostream &os) {
      sg::io::WriteImagesCsv(os, images, res.glue->target().dim());
    });
  }
  const auto &d = res.distortion;
  std::cerr << "pairs " << d.pair_count << "  distortion " << d.distortion << "  bound "
            << d.bounds.ratio << "  violations " << d.violations.size() << '\n';
  if (!res.ok()) {
    const auto &v = d.violations.front();
    std::cerr << "bound violated: " << v.which << " on pair (" << v.x_id << ", " << v.y_id
              << ") slack " << v.slack << '\n';
    return ExitCodeFor(sg::ErrorKind::kBoundViolated);
  }
  return 0;
}

struct TheoryFlags {
  std::size_t grid = 10001;
  std::size_t fuzz = 1000;
  std::uint64_t seed = 1;
};

int CmdTheory(const TheoryFlags &f, const ParamFlags &pf) {
  bool ok = true;
  Json out;
  const auto la = sg::la_min_check(f.grid);
  const double expected = std::numbers::sqrt2 / 3.0;
  const bool la_ok = std::abs(la.min_value - expected) <= 1e-6 && la.p_nonincreasing &&
                     la.q_nondecreasing && la.max_closed_form_gap <= 1e-12 &&
                     std::abs(la.at_zero - 1.0) <= 1e-12 && std::abs(la.at_half_pi - 1.0) <= 1e-12;
  ok = ok && la_ok;
  out["pab_minimum"] = {{"grid", f.grid},
                        {"min_value", la.min_value},
                        {"expected", expected},
                        {"argmin", la.argmin},
                        {"at_zero", la.at_zero},
                        {"at_half_pi", la.at_half_pi},
                        {"p_nonincreasing", la.p_nonincreasing},
                        {"q_nondecreasing", la.q_nondecreasing},
                        {"max_closed_form_gap", la.max_closed_form_gap},
                        {"pass", la_ok}};
  const auto fz = sg::FuzzSameLevelPairs(pf.Get(), f.seed, f.fuzz);
  const bool fz_ok = fz.worst_sandwich_slack >= -sg::kSlackTolerance &&
                     fz.max_identity_residual <= sg::kSlackTolerance;
  ok = ok && fz_ok;
  out["same_level_fuzz"] = {{"pairs", fz.pairs},
                            {"ramp_pairs", fz.ramp_pairs},
                            {"worst_sandwich_slack", fz.worst_sandwich_slack},
                            {"max_identity_residual", fz.max_identity_residual},
                            {"banks", fz.banks},
                            {"pass", fz_ok}};

  // Bound ratio as all four parameters shrink by 2^-k: never increases, never below 3.
  const sg::Params base = pf.Get();
  Json ratios = Json::array();
  bool mono_ok = true;
  Json witness = nullptr;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 20; ++k) {
    const double s = std::ldexp(1.0, -k);
    const sg::Params p{base.eps * s, base.delta * s, base.gamma * s, base.zeta * s};
    const double r = sg::theoretical_bounds(p).ratio;
    ratios.push_back(r);
    if (witness.is_null() && (r > prev + 1e-9 || r < 3.0)) {
      mono_ok = false;
      witness = {{"k", k}, {"ratio", r}, {"previous", prev}};
    }
    prev = r;
  }
  ok = ok && mono_ok;
  out["bound_monotonicity"] = {{"ratios", ratios}, {"witness", witness}, {"pass", mono_ok}};
  out["pass"] = ok;
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : 1;
}

struct WeightsFlags {
  std::string config;
  double r1 = 1.0;
  std::size_t levels = 3;
  double margin = 0.01;
  std::size_t grid = 10000;
  std::string out;
};

int CmdWeights(const WeightsFlags &f, const ParamFlags &pf) {
  sg::Params p = pf.Get();
  double r1 = f.r1, margin = f.margin;
  std::size_t levels = f.levels;
  if (!f.config.empty()) {
    const auto cfg = sg::ParseRunConfig(sg::ReadJsonFile(f.config));
    p = sg::ResolveParams(cfg);
    r1 = cfg.r1;
    levels = cfg.levels;
    margin = cfg.margin;
  }
  const sg::WeightSystem ws(sg::build_schedule(p, r1, levels, margin));
  const auto grid = sg::LogGrid(ws.schedule(), f.grid);
  const auto rep = sg::CheckWeightLawsOnGrid(ws, grid);
  if (!f.out.empty())
    WriteStream(f.out, [&](std::ostream &os) { sg::io::WriteWeightsCsv(os, ws, f.grid); });
  Json summary = {{"samples", rep.samples},
                  {"max_tau_slope_excess", rep.max_tau_slope_excess},
                  {"min_tau_slope", rep.min_tau_slope},
                  {"max_speed_excess", rep.max_speed_excess},
                  {"max_speed_excess_abs", rep.max_speed_excess_abs},
                  {"max_partition_error", rep.max_partition_error},
                  {"support_violations", rep.support_violations},
                  {"plateau_violations", rep.plateau_violations},
                  {"monotonicity_violations", rep.monotonicity_violations},
                  {"pass", rep.Passed()}};
  (f.out.empty() || f.out == "-" ? std::cerr : std::cout) << summary.dump(2) << '\n';
  return rep.Passed() ? 0 : 1;
}

struct GenFlags {
  double r1 = 1.0;
  std::size_t levels = 3;
  double margin = 0.01;
  std::uint64_t seed = 0;
  std::size_t per_level = 10;
  std::string placement = "mixed";
  std::optional<std::size_t> only_level;
  std::size_t dim = 3;
  std::string p = "1";
  std::string out;
};

int CmdGenPoints(const GenFlags &f, const ParamFlags &pf) {
  const auto sched = sg::build_schedule(pf.Get(), f.r1, f.levels, f.margin);
  Json space = {{"dim", f.dim}, {"norm", "lp"}};
  space["p"] = f.p == "inf" ? Json("inf") : Json(std::stod(f.p));
  const auto pts = sg::generate_annular(f.seed, sched, f.per_level, sg::io::SpaceFromJson(space),
                                        sg::PlacementFromString(f.placement), f.only_level);
  WriteText(f.out, sg::io::PointSetToJson(pts).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bilipschitz embeddings by logarithmic-spiral gluing"};
  app.require_subcommand(1);

  ParamFlags bounds_params;
  std::optional<double> target;
  auto *bounds = app.add_subcommand("bounds", "closed-form distortion bounds");
  bounds_params.Attach(bounds);
  bounds->add_option("--target", target, "solve parameters for distortion 3 + target");

  RunFlags run_flags;
  auto *run = app.add_subcommand("run", "build the embedding and verify every pair");
  run->add_option("--config", run_flags.config, "run configuration (JSON)")->required();
  run->add_option("--out", run_flags.out, "report path ('-' for stdout)");
  run->add_option("--pairs", run_flags.pairs, "per-pair CSV path");
  run->add_option("--seed", run_flags.seed, "override generator and bank seeds");
  run->add_option("--workers", run_flags.workers, "verification threads");
  run->add_option("--tolerance", run_flags.tolerance, "slack tolerance");

  ParamFlags theory_params;
  TheoryFlags theory_flags;
  auto *theory = app.add_subcommand("theory", "numeric checks of the scalar inequalities and bound monotonicity");
  theory_params.Attach(theory);
  theory->add_option("--grid", theory_flags.grid, "angle grid size")->capture_default_str();
  theory->add_option("--fuzz", theory_flags.fuzz, "random same-level pairs")->capture_default_str();
  theory->add_option("--seed", theory_flags.seed, "fuzz seed")->capture_default_str();

  ParamFlags weights_params;
  WeightsFlags weights_flags;
  auto *weights = app.add_subcommand("weights", "sample the weight system and check its laws");
  weights_params.Attach(weights);
  weights->add_option("--config", weights_flags.config, "take the schedule from a run config");
  weights->add_option("--r1", weights_flags.r1)->capture_default_str();
  weights->add_option("--levels", weights_flags.levels)->capture_default_str();
  weights->add_option("--margin", weights_flags.margin)->capture_default_str();
  weights->add_option("--grid", weights_flags.grid, "samples")->capture_default_str();
  weights->add_option("--out", weights_flags.out, "CSV path ('-' for stdout)");

  ParamFlags gen_params;
  GenFlags gen_flags;
  auto *gen = app.add_subcommand("gen-points", "sample an annular point set");
  gen_params.Attach(gen);
  gen->add_option("--r1", gen_flags.r1)->capture_default_str();
  gen->add_option("--levels", gen_flags.levels)->capture_default_str();
  gen->add_option("--margin", gen_flags.margin)->capture_default_str();
  gen->add_option("--seed", gen_flags.seed)->capture_default_str();
  gen->add_option("--per-level", gen_flags.per_level)->capture_default_str();
  gen->add_option("--placement", gen_flags.placement, "plateau | ramp | mixed")
      ->capture_default_str();
  gen->add_option("--only-level", gen_flags.only_level, "put every point in one level");
  gen->add_option("--dim", gen_flags.dim)->capture_default_str();
  gen->add_option("--p", gen_flags.p, "lp exponent or 'inf'")->capture_default_str();
  gen->add_option("--out", gen_flags.out, "output path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return CmdBounds(bounds_params, target);
    if (run->parsed()) return CmdRun(run_flags);
    if (theory->parsed()) return CmdTheory(theory_flags, theory_params);
    if (weights->parsed()) return CmdWeights(weights_flags, weights_params);
    if (gen->parsed()) return CmdGenPoints(gen_flags, gen_params);
  } catch (const sg::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
