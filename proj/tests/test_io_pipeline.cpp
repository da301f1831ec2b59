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
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "spiralglue/spiralglue.hpp"

namespace sg = spiralglue;
using sg::io::Json;

namespace {

std::string Cfg(const char *name) { return std::string(SPIRALGLUE_CONFIG_DIR) + "/" + name; }

std::size_t Lines(const std::string &s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(Io, SpaceRoundTrip) {
  for (const auto &s :
       {sg::Space::Lp(3, 1.5), sg::Space::LInf(2),
        sg::Space::Make(2, sg::WeightedLpNorm{sg::LpExponent::Finite(2.0), {1.0, 3.0}}),
        sg::Space::Make(2, sg::MaxAbsFunctionalsNorm{{{1.0, 0.0}, {1.0, 1.0}}})}) {
    const Json j = sg::io::SpaceToJson(s);
    EXPECT_TRUE(sg::io::SpaceFromJson(Json::parse(j.dump())).SameAs(s)) << j.dump();
  }
  EXPECT_EQ(sg::io::SpaceToJson(sg::Space::LInf(2))["p"], "inf");
  EXPECT_EQ(sg::io::SpaceFromJson(Json::parse(R"({"norm":"lp","p":2})"), 5).dim(), 5u);
  EXPECT_THROW(sg::io::SpaceFromJson(Json::parse(R"({"norm":"lp","p":2})")), sg::Error);
  EXPECT_THROW(sg::io::SpaceFromJson(Json::parse(R"({"dim":2,"norm":"lq","p":2})")), sg::Error);
  EXPECT_THROW(sg::io::SpaceFromJson(Json::parse(R"({"dim":2,"norm":"lp","p":"two"})")), sg::Error);
}

TEST(Io, PointSetRoundTrip) {
  const auto sched = sg::build_schedule({0.2, 0.1, 0.01, 0.01}, 1.0, 2);
  const auto pts = sg::generate_annular(5, sched, 4, sg::Space::Lp(3, 2.0), sg::Placement::kMixed);
  const auto back = sg::io::PointSetFromJson(Json::parse(sg::io::PointSetToJson(pts).dump()));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_EQ(back.points()[k].id, pts.points()[k].id);
    EXPECT_EQ(back.points()[k].point, pts.points()[k].point);
  }
}

TEST(Config, RejectsMalformedRuns) {
  Json j = sg::ReadJsonFile(Cfg("block_shift_l1.json"));
  EXPECT_NO_THROW(sg::ParseRunConfig(j));
  Json both = j;
  both["eps_target"] = 0.5;
  EXPECT_THROW(sg::ParseRunConfig(both), sg::Error);
  Json bad_bank = j;
  bad_bank["bank"]["strategy"] = "magic";
  EXPECT_THROW(sg::ParseRunConfig(bad_bank), sg::Error);
  Json missing = j;
  missing["points"] = {{"file", "/nonexistent/points.json"}};
  try {
    sg::ParseRunConfig(missing);
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kConfig);
  }
  Json bad_params = j;
  bad_params["params"]["eps"] = 1.5;
  EXPECT_THROW(sg::ParseRunConfig(bad_params), sg::Error);
  EXPECT_THROW(sg::ReadJsonFile("/nonexistent.json"), sg::Error);
}

TEST(Pipeline, BlockShiftRunIsDeterministicAndGreen) {
  const auto cfg = sg::ParseRunConfig(sg::ReadJsonFile(Cfg("block_shift_l1.json")));
  const auto a = sg::RunPipeline(cfg);
  const auto b = sg::RunPipeline(cfg);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_EQ(a.report["status"], "ok");
  EXPECT_EQ(a.report["selection"]["chosen"].size(), 4u);
  EXPECT_LE(a.distortion.distortion, a.distortion.bounds.ratio);
  EXPECT_FALSE(a.report.contains("timings"));
  EXPECT_TRUE(a.timings.contains("verify"));

  auto threaded = cfg;
  threaded.workers = 3;
  const auto c = sg::RunPipeline(threaded);
  EXPECT_EQ(a.report["distortion"].dump(), c.report["distortion"].dump());
}

TEST(Pipeline, InlineAndFilePointsAgree) {
  Json j = sg::ReadJsonFile(Cfg("block_shift_l1.json"));
  const auto cfg = sg::ParseRunConfig(j);
  const auto base = sg::RunPipeline(cfg);
  const std::string path = testing::TempDir() + "points_roundtrip.json";
  {
    std::ofstream out(path);
    out << sg::io::PointSetToJson(base.points).dump();
  }
  j["points"] = {{"file", path}};
  const auto from_file = sg::RunPipeline(sg::ParseRunConfig(j));
  EXPECT_EQ(from_file.report["distortion"].dump(), base.report["distortion"].dump());
}

TEST(Pipeline, AdversarialBankIsExhausted) {
  const auto cfg = sg::ParseRunConfig(sg::ReadJsonFile(Cfg("adversarial_identity.json")));
  try {
    sg::RunPipeline(cfg);
    FAIL();
  } catch (const sg::BankExhausted &e) {
    EXPECT_EQ(e.level(), 1u);
    EXPECT_NEAR(e.angle(), std::numbers::pi / 4.0, 1e-12);
    EXPECT_LT(e.achieved(), 1e-12);
  }
}

TEST(Pipeline, EpsTargetResolvesParams) {
  const auto cfg = sg::ParseRunConfig(sg::ReadJsonFile(Cfg("quadrature_l2_l1.json")));
  const auto p = sg::ResolveParams(cfg);
  EXPECT_EQ(p.eps, sg::solve_params(0.5).eps);
  const auto res = sg::RunPipeline(cfg);
  EXPECT_TRUE(res.ok());
  EXPECT_LE(res.distortion.bounds.ratio, 3.5 + 1e-12);
}

TEST(Csv, WeightsAndPairs) {
  const sg::WeightSystem ws(sg::build_schedule({0.1, 0.1, 0.01, 0.01}, 1.0, 2));
  std::ostringstream os;
  sg::io::WriteWeightsCsv(os, ws, 50);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,mu_1,mu_2,mu_3");
  EXPECT_EQ(Lines(s), 51u);

  const sg::WeightSystem huge(sg::build_schedule({0.001, 0.1, 0.01, 0.01}, 1.0, 1));
  std::ostringstream sink;
  try {
    sg::io::WriteWeightsCsv(sink, huge, 10);
    FAIL();
  } catch (const sg::Error &e) {
    EXPECT_EQ(e.kind(), sg::ErrorKind::kOverflow);
  }

  const auto cfg = sg::ParseRunConfig(sg::ReadJsonFile(Cfg("plateau_only.json")));
  const auto res = sg::RunPipeline(cfg);
  std::ostringstream pairs;
  sg::io::WritePairsCsv(pairs, res.distortion);
  const std::string p = pairs.str();
  EXPECT_EQ(p.substr(0, p.find('\n')), "x_id,y_id,class,ratio,lower_slack,upper_slack");
  EXPECT_EQ(Lines(p), res.distortion.pair_count + 1);
}

}  // namespace
