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


#include "dresslab/reward.h"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "dresslab/binary_io.h"
#include "dresslab/expert.h"

namespace dresslab {
namespace {

TEST(TimePreferenceTest, Rule) {
  EXPECT_EQ(TimePreference(5, 3), 0);
  EXPECT_EQ(TimePreference(3, 5), 1);
  EXPECT_EQ(TimePreference(4, 4), -1);
}

TEST(TimePreferenceTest, Antisymmetric) {
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const int a = TimePreference(i, j);
      const int b = TimePreference(j, i);
      if (a == -1) {
        EXPECT_EQ(b, -1);
      } else {
        EXPECT_EQ(a, 1 - b);
      }
    }
  }
}

TEST(OraclePreferenceTest, Examples) {
  Rng rng(1);
  EXPECT_EQ(OraclePreference(0.30, 0.10, 0.02, 0.0, rng), 0);
  EXPECT_EQ(OraclePreference(0.10, 0.30, 0.02, 0.0, rng), 1);
  EXPECT_EQ(OraclePreference(0.20, 0.21, 0.02, 0.0, rng), -1);
  EXPECT_THROW(OraclePreference(0.2, 0.3, -0.01, 0.0, rng), RangeError);
}

TEST(OraclePreferenceTest, FullFlipInvertsDecidableLabels) {
  Rng a(2), b(2), d(3);
  for (int k = 0; k < 200; ++k) {
    const double x = UniformDraw(d), y = UniformDraw(d);
    const int clean = OraclePreference(x, y, 0.02, 0.0, a);
    const int flipped = OraclePreference(x, y, 0.02, 1.0, b);
    if (clean == -1) {
      EXPECT_EQ(flipped, -1);
    } else {
      EXPECT_EQ(flipped, 1 - clean);
    }
  }
}

TEST(BtProbabilityTest, Values) {
  EXPECT_EQ(BtProbability(0.3, 0.3), 0.5);
  EXPECT_NEAR(BtProbability(std::log(3.0), 0.0), 0.75, 1e-12);
  const double p = BtProbability(1000.0, 0.0);
  EXPECT_TRUE(std::isfinite(p));
  EXPECT_GT(p, 1.0 - 1e-12);
  EXPECT_LE(p, 1.0);
}

TEST(BtProbabilityTest, ComplementAndShiftInvariance) {
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const double a = 5 * NormalDraw(rng), b = 5 * NormalDraw(rng), c = 50 * NormalDraw(rng);
    EXPECT_NEAR(BtProbability(a, b) + BtProbability(b, a), 1.0, 1e-15);
    EXPECT_NEAR(BtProbability(a + c, b + c), BtProbability(a, b), 1e-12);
  }
}

TEST(BtLossTest, Examples) {
  EXPECT_NEAR(BtLoss({0.2, -1.0}, {0.2, -1.0}, {0, 1}), std::log(2.0), 1e-15);
  EXPECT_NEAR(BtLoss({std::log(3.0)}, {0.0}, {0}), std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(BtLoss({0.0}, {std::log(3.0)}, {1}), std::log(4.0 / 3.0), 1e-12);
  EXPECT_THROW(BtLoss({0.0}, {1.0}, {-1}), ContractError);
}

TEST(BtLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  std::vector<double> r0(8), r1(8);
  std::vector<int> y(8);
  for (int k = 0; k < 8; ++k) {
    r0[k] = NormalDraw(rng);
    r1[k] = NormalDraw(rng);
    y[k] = k % 2;
  }
  std::vector<double> d0, d1;
  BtLoss(r0, r1, y, &d0, &d1);
  const double h = 1e-6;
  for (int k = 0; k < 8; ++k) {
    for (int side = 0; side < 2; ++side) {
      std::vector<double>& r = side ? r1 : r0;
      const double keep = r[k];
      r[k] = keep + h;
      const double up = BtLoss(r0, r1, y);
      r[k] = keep - h;
      const double down = BtLoss(r0, r1, y);
      r[k] = keep;
      const double fd = (up - down) / (2 * h);
      const double an = side ? d1[k] : d0[k];
      EXPECT_LT(std::abs(fd - an) / std::max(std::abs(an), 1e-8), 1e-6);
    }
  }
}

TEST(ForcePenaltyTest, Examples) {
  EXPECT_EQ(ForcePenalty(Vec3::Zero(), 8.0), 0.0);
  EXPECT_EQ(ForcePenalty(Vec3(4, 0, 0), 8.0), -0.25);
  EXPECT_EQ(ForcePenalty(Vec3(0, 8, 0), 8.0), -1.0);
  EXPECT_EQ(ForcePenalty(Vec3(0, 0, 16), 8.0), -1.0);
  EXPECT_THROW(ForcePenalty(Vec3::Zero(), 0.0), RangeError);
}

TEST(ForcePenaltyTest, MonotoneAndBounded) {
  double prev = 0.0;
  for (double f = 0.0; f < 30.0; f += 0.25) {
    const double p = ForcePenalty(Vec3(f, 0, 0), kDefaultForceNormalizer);
    EXPECT_LE(p, prev);
    EXPECT_GE(p, -1.0);
    prev = p;
  }
}

TEST(CompositeRewardTest, Examples) {
  EXPECT_EQ(CompositeReward(1.0, 0.0, 0.1), 1.0);
  EXPECT_EQ(CompositeReward(-0.95, -1.0, 0.1), -1.0);
  EXPECT_NEAR(CompositeReward(0.5, ForcePenalty(Vec3(8, 0, 0), 8.0), 0.1), 0.4, 1e-15);
}

std::vector<Trajectory> ExpertRollouts(int n, uint64_t seed) {
  ScriptedExpert expert;
  std::vector<Trajectory> ts;
  for (int i = 0; i < n; ++i) {
    EnvConfig c;
    c.body = StandardBody(static_cast<SizeClass>(i % 4));
    c.seed = SplitSeed(seed, i);
    ts.push_back(RunEpisode(expert, c));
  }
  return ts;
}

TEST(GeneratePreferencesTest, CountsSourcesAndLabels) {
  const std::vector<Trajectory> ts = ExpertRollouts(4, 1);
  const std::vector<PreferencePair> ps = GeneratePreferences(ts, 50, 60, {}, 9);
  ASSERT_EQ(ps.size(), 110u);
  for (int k = 0; k < 110; ++k) {
    const PreferencePair& p = ps[k];
    if (k < 50) {
      EXPECT_EQ(p.source, PreferenceSource::kOracle);
      const double gap = std::abs(DepthAt(ts, p.sample_0) - DepthAt(ts, p.sample_1));
      if (gap < 0.02) EXPECT_EQ(p.label, -1);
    } else {
      EXPECT_EQ(p.source, PreferenceSource::kTimeBased);
      EXPECT_EQ(p.sample_0.traj, p.sample_1.traj);
      EXPECT_EQ(p.label, TimePreference(p.sample_0.step, p.sample_1.step));
    }
  }
  EXPECT_EQ(SerializePreferences(GeneratePreferences(ts, 50, 60, {}, 9)),
            SerializePreferences(ps));
}

TEST(PreferenceFileTest, RoundTripAndCorruption) {
  std::vector<PreferencePair> ps = {{{0, 1}, {0, 3}, 1, PreferenceSource::kTimeBased},
                                    {{2, 0}, {1, 5}, -1, PreferenceSource::kOracle}};
  const std::vector<uint8_t> bytes = SerializePreferences(ps);
  EXPECT_EQ(SerializePreferences(DeserializePreferences(bytes)), bytes);
  std::vector<uint8_t> cut(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(DeserializePreferences(cut), CorruptFileError);
  std::vector<uint8_t> bumped = bytes;
  bumped[4] += 1;
  EXPECT_THROW(DeserializePreferences(bumped), UnsupportedVersionError);
  std::vector<uint8_t> bad_label = bytes;
  bad_label[12 + 16] = 7;
  EXPECT_THROW(DeserializePreferences(bad_label), CorruptFileError);
}

nn::PointNetConfig TinyRewardConfig() {
  nn::PointNetConfig cfg = RewardNetConfig();
  cfg.sa_widths = {8, 16};
  cfg.global_width = 16;
  cfg.head_hidden = {16};
  return cfg;
}

// One trajectory over a fixed observation whose actions sweep the x axis.
std::vector<Trajectory> ActionSweep(int n, uint64_t seed) {
  EnvConfig c;
  c.seed = seed;
  DressingEnv env(c);
  env.Reset();
  Trajectory t;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    TrajectoryStep s;
    s.obs = env.observation();
    s.action = Vec6::Zero();
    s.action[0] = Quantize(0.02 * (2.0 * UniformDraw(rng) - 1.0));
    s.action[1] = Quantize(0.02 * (2.0 * UniformDraw(rng) - 1.0));
    s.done = i + 1 == n;
    t.steps.push_back(s);
    t.privileged.push_back(PrivilegedStep{});
  }
  return {t};
}

std::vector<PreferencePair> ByActionX(const std::vector<Trajectory>& ts, int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<PreferencePair> ps;
  const int len = ts[0].size();
  for (int k = 0; k < n; ++k) {
    PreferencePair p;
    p.sample_0 = {0, static_cast<int>(IndexDraw(rng, len))};
    p.sample_1 = {0, static_cast<int>(IndexDraw(rng, len))};
    const double a = ts[0].steps[p.sample_0.step].action[0];
    const double b = ts[0].steps[p.sample_1.step].action[0];
    p.label = a == b ? -1 : (a > b ? 0 : 1);
    ps.push_back(p);
  }
  return ps;
}

TEST(TrainRewardModelTest, RecoversMonotoneOrdering) {
  const std::vector<Trajectory> ts = ActionSweep(60, 3);
  RewardModel model(TinyRewardConfig());
  RewardTrainConfig cfg{.max_epochs = 60, .lr = 3e-3, .batch = 16, .seed = 4};
  Rng rng(5);
  model.Init(rng);
  TrainRewardModel(model, ts, ByActionX(ts, 400, 6), cfg);
  const std::vector<PreferencePair> test = ByActionX(ts, 400, 7);
  int used = 0, ok = 0;
  for (const PreferencePair& p : test) {
    if (p.label < 0) continue;
    const TrajectoryStep& a = ts[0].steps[p.sample_0.step];
    const TrajectoryStep& b = ts[0].steps[p.sample_1.step];
    ok += (model.Raw(a.obs, a.action) > model.Raw(b.obs, b.action)) == (p.label == 0);
    ++used;
  }
  EXPECT_GE(static_cast<double>(ok) / used, 0.95);
  EXPECT_TRUE(model.fitted());
}

TEST(TrainRewardModelTest, UntrainedIsNearChance) {
  const std::vector<Trajectory> ts = ActionSweep(40, 8);
  const std::vector<PreferencePair> pairs = ByActionX(ts, 200, 9);
  double mean = 0.0;
  const int inits = 20;
  for (int k = 0; k < inits; ++k) {
    RewardModel model(TinyRewardConfig());
    RewardTrainConfig cfg{.max_epochs = 0, .heldout_fraction = 0.5, .seed = 100u + k};
    const RewardTrainResult r = TrainRewardModel(model, ts, pairs, cfg);
    EXPECT_EQ(r.epochs, 0);
    EXPECT_TRUE(model.fitted());
    mean += r.heldout_accuracy / inits;
  }
  EXPECT_NEAR(mean, 0.5, 0.1);
}

TEST(TrainRewardModelTest, IndecidablePairsFail) {
  const std::vector<Trajectory> ts = ActionSweep(5, 10);
  std::vector<PreferencePair> ps = {{{0, 1}, {0, 1}, -1, PreferenceSource::kTimeBased}};
  RewardModel model(TinyRewardConfig());
  EXPECT_THROW(TrainRewardModel(model, ts, ps, {}), SamplingFailure);
}

TEST(LabelDatasetTest, RangeAndUnfittedRejection) {
  std::vector<Trajectory> ts = ExpertRollouts(3, 11);
  RewardModel model(TinyRewardConfig());
  Rng rng(12);
  model.Init(rng);
  EXPECT_THROW(LabelDataset(ts, model, 0.1, 8.0), ContractError);
  model.FitNormalization(ts);
  LabelDataset(ts, model, 0.1, ForceNormalizer95(ts));
  for (const Trajectory& t : ts) {
    for (int i = 0; i < t.size(); ++i) {
      EXPECT_GE(t.steps[i].reward, -1.0);
      EXPECT_LE(t.steps[i].reward, 1.0);
      const double r_pref = model.Normalized(t.steps[i].obs, t.steps[i].action);
      EXPECT_EQ(t.steps[i].reward,
                Quantize(CompositeReward(r_pref, ForcePenalty(t.privileged[i].raw_force,
                                                              ForceNormalizer95(ts)),
                                         0.1)));
    }
  }
}

TEST(RewardModelTest, CheckpointKeepsNormalization) {
  const std::vector<Trajectory> ts = ExpertRollouts(2, 13);
  RewardModel model(TinyRewardConfig());
  Rng rng(14);
  model.Init(rng);
  model.FitNormalization(ts);
  const std::string path =
      (std::filesystem::temp_directory_path() / "dresslab_reward.ckpt").string();
  model.Save(path);
  const RewardModel back = RewardModel::Load(path, TinyRewardConfig());
  EXPECT_EQ(back.norm_min(), model.norm_min());
  EXPECT_EQ(back.norm_max(), model.norm_max());
  const TrajectoryStep& s = ts[0].steps[0];
  EXPECT_EQ(back.Raw(s.obs, s.action), model.Raw(s.obs, s.action));
  std::filesystem::remove(path);
}

TEST(ForceNormalizerTest, NinetyFifthPercentile) {
  Trajectory t;
  for (int i = 1; i <= 100; ++i) {
    PrivilegedStep p;
    p.raw_force = Vec3(i, 0, 0);
    t.privileged.push_back(p);
  }
  EXPECT_EQ(ForceNormalizer95({t}), 95.0);
  EXPECT_EQ(ForceNormalizer95({}), kDefaultForceNormalizer);
}

}  // namespace
}  // namespace dresslab
