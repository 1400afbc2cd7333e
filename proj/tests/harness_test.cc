// Copyright 2026 The Dresslab Authors
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


#include "dresslab/harness.h"

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "dresslab/expert.h"
#include "dresslab/pipeline.h"

namespace dresslab {
namespace {

TEST(TargetConfigsTest, BalancedOverMotionsAndGarments) {
  const std::vector<EnvConfig> cs = TargetConfigs(204, 1);
  ASSERT_EQ(cs.size(), 204u);
  std::map<std::pair<std::string, std::string>, int> cells;
  std::set<uint64_t> seeds;
  for (const EnvConfig& c : cs) {
    EXPECT_EQ(c.domain, Domain::kTarget);
    EXPECT_EQ(c.body.size_class, SizeClass::kMedium);
    ASSERT_TRUE(c.motion.has_value());
    ++cells[{c.MotionLabel(), c.garment.name}];
    seeds.insert(c.seed);
  }
  ASSERT_EQ(cells.size(), 10u);
  for (const auto& [key, n] : cells) {
    EXPECT_GE(n, 20);
    EXPECT_LE(n, 21);
  }
  EXPECT_EQ(seeds.size(), 204u);
  EXPECT_TRUE(TargetConfigs(0, 1).empty());
  EXPECT_THROW(TargetConfigs(-1, 1), RangeError);
}

TEST(TargetConfigsTest, DeterministicPerSeed) {
  const auto a = TargetConfigs(12, 7), b = TargetConfigs(12, 7), c = TargetConfigs(12, 8);
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(a[i].Hash(), b[i].Hash());
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_NE(a[i].seed, c[i].seed);
  }
}

TEST(SourceConfigsTest, StaticAndCyclingSizes) {
  const std::vector<EnvConfig> cs = SourceConfigs(8, 3);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(cs[i].domain, Domain::kSource);
    EXPECT_FALSE(cs[i].motion.has_value());
    EXPECT_EQ(static_cast<int>(cs[i].body.size_class), i % 4);
  }
}

TEST(EvalGridTest, DeskAndFullSizes) {
  EXPECT_EQ(DeskGrid().Episodes(), 2 * 14 * 4 * 5);
  EXPECT_EQ(DeskGrid().garments, (std::vector<std::string>{"narrow", "short"}));
  EXPECT_EQ(FullGrid().trials, 10);
  EXPECT_EQ(FullGrid().motions.size(), 14u);
}

EvalGrid OneCell(int trials) {
  EvalGrid g;
  g.garments = {"narrow"};
  g.motions = {AllMotions().front()};
  g.sizes = {SizeClass::kLarge};
  g.trials = trials;
  return g;
}

TEST(EvaluateGridTest, SingleCellMatchesDirectEpisodes) {
  ScriptedExpert expert;
  const EvalReport r = EvaluateGrid("expert", expert, OneCell(3), 11);
  ASSERT_EQ(r.cells.size(), 1u);
  const EvalCell& c = r.cells[0];
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.garment, "narrow");
  EXPECT_EQ(c.size, SizeClass::kLarge);

  double upper = 0.0;
  std::array<int, kTerminationCount> reasons{};
  for (int k = 0; k < 3; ++k) {
    EnvConfig cfg;
    cfg.domain = Domain::kTarget;
    cfg.body = StandardBody(SizeClass::kLarge);
    cfg.motion = AllMotions().front();
    cfg.garment = GarmentProfile("narrow");
    cfg.seed = EpisodeSeed(11, k);
    const Trajectory t = RunEpisode(expert, cfg);
    upper += ComputeDressedRatios(t).upper / 3;
    ++reasons[static_cast<int>(t.meta.reason) - 1];
  }
  EXPECT_NEAR(c.upper, upper, 1e-12);
  EXPECT_EQ(c.reasons, reasons);
}

TEST(EvaluateGridTest, ReasonsPartitionEpisodes) {
  ZeroPolicy zero;
  EvalGrid g = OneCell(2);
  g.sizes = {SizeClass::kSmall, SizeClass::kXLarge};
  const EvalReport r = EvaluateGrid("zero", zero, g, 3);
  int total = 0;
  for (int n : r.Reasons("zero")) total += n;
  EXPECT_EQ(total, r.Episodes("zero"));
  EXPECT_EQ(total, g.Episodes());
  EXPECT_EQ(r.Reasons("zero")[static_cast<int>(Termination::kNoProgress) - 1], 4);
  EXPECT_THROW(EvaluateGrid("zero", zero, OneCell(0), 3), RangeError);
}

EvalReport Synthetic() {
  EvalReport r;
  const char* methods[] = {"vision", "fmvp"};
  double u = 0.125;
  for (const char* m : methods) {
    for (SizeClass s : {SizeClass::kSmall, SizeClass::kMedium, SizeClass::kLarge,
                        SizeClass::kXLarge}) {
      for (const char* motion : {"raise_arm", "lower_arm"}) {
        EvalCell c;
        c.method = m;
        c.garment = "narrow";
        c.motion = motion;
        c.size = s;
        c.upper = u;
        c.whole = u / 3;
        c.trials = 2;
        c.reasons = {0, 1, 1, 0};
        r.cells.push_back(c);
        u += 0.0625;
      }
    }
  }
  return r;
}

TEST(EvalReportTest, Aggregates) {
  const EvalReport r = Synthetic();
  EXPECT_EQ(r.Methods(), (std::vector<std::string>{"vision", "fmvp"}));
  double vision = 0.0;
  for (int i = 0; i < 8; ++i) vision += (0.125 + 0.0625 * i) / 8;
  EXPECT_NEAR(r.MeanUpper("vision"), vision, 1e-15);
  EXPECT_NEAR(r.MeanWhole("vision"), vision / 3, 1e-15);
  EXPECT_EQ(r.Episodes("fmvp"), 16);
  EXPECT_EQ(r.Reasons("fmvp")[1], 8);
  EXPECT_EQ(r.MeanUpper("missing"), 0.0);
}

TEST(EvalReportTest, TablesHaveOneRowPerMethod) {
  const EvalReport r = Synthetic();
  const std::string csv = r.SizeCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,Small,Medium,Large,XLarge,Average");
  EXPECT_NE(csv.find("\nvision,"), std::string::npos);
  EXPECT_NE(csv.find("\nfmvp,"), std::string::npos);
  EXPECT_NE(r.SizeTable().find("XLarge"), std::string::npos);
  EXPECT_NE(r.MotionCsv().find("raise_arm"), std::string::npos);
  EXPECT_NE(r.MotionTable().find("fmvp"), std::string::npos);
}

TEST(EvalReportTest, CellsCsvRoundTrip) {
  const EvalReport r = Synthetic();
  const EvalReport back = EvalReport::FromCellsCsv(r.CellsCsv());
  ASSERT_EQ(back.cells.size(), r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].method, r.cells[i].method);
    EXPECT_EQ(back.cells[i].upper, r.cells[i].upper);
    EXPECT_EQ(back.cells[i].whole, r.cells[i].whole);
    EXPECT_EQ(back.cells[i].reasons, r.cells[i].reasons);
    EXPECT_EQ(back.cells[i].size, r.cells[i].size);
  }
  EXPECT_THROW(EvalReport::FromCellsCsv(""), ContractError);
  EXPECT_THROW(EvalReport::FromCellsCsv("h\nvision,narrow\n"), ContractError);
}

TEST(EvalReportTest, MergeAppends) {
  EvalReport a = Synthetic();
  MergeReports(a, Synthetic());
  EXPECT_EQ(a.Episodes("vision"), 32);
}

TEST(MethodPolicyTest, ChecksArchitecture) {
  nn::ParameterStore vision;
  Rng rng(1);
  GaussianPolicy(PolicyNetConfig(nn::ForceMode::kNone)).Init(vision, rng);
  EXPECT_NO_THROW(MethodPolicy("vision", vision));
  EXPECT_THROW(MethodPolicy("fmvp", vision), ContractError);
  EXPECT_THROW(MethodPolicy("fcvp", vision), ContractError);
  EXPECT_THROW(MethodPolicy("oracle", vision), RangeError);
  EXPECT_EQ(EvalMethods().size(), 8u);
  EXPECT_EQ(EvalMethods().front(), "vision");
}

}  // namespace
}  // namespace dresslab
