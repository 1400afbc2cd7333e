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


#include "dresslab/fcvp.h"

#include <gtest/gtest.h>

namespace dresslab {
namespace {

nn::PointNetConfig TinyVision() {
  nn::PointNetConfig cfg = PolicyNetConfig(nn::ForceMode::kNone);
  cfg.sa_widths = {8, 16};
  cfg.global_width = 16;
  cfg.fp_widths = {16, 16, 8};
  cfg.head_hidden = {16};
  return cfg;
}

Trajectory ConstantForceTrajectory(int n, double magnitude) {
  EnvConfig c;
  c.seed = 1;
  DressingEnv env(c);
  env.Reset();
  Trajectory t;
  for (int i = 0; i < n; ++i) {
    TrajectoryStep s;
    s.obs = env.observation();
    s.obs.force.raw = Vec3(0, magnitude, 0);
    t.steps.push_back(s);
    PrivilegedStep p;
    p.raw_force = Vec3(magnitude * 0.6, 0, magnitude * 0.8);
    t.privileged.push_back(p);
  }
  return t;
}

TEST(ForceWindowTest, ConstantForceSumsToFiveTimes) {
  const GaussianPolicy vision(TinyVision());
  nn::ParameterStore store;
  Rng rng(1);
  vision.Init(store, rng);
  const auto w = BuildForceWindows({ConstantForceTrajectory(12, 2.0)}, vision, store);
  ASSERT_EQ(w.size(), 4u);  // starts 4..7
  for (const ForceWindowSample& s : w) {
    EXPECT_NEAR(s.target, 10.0, 1e-12);
    EXPECT_EQ(s.latent.size(), vision.config().LatentWidth());
    for (const Vec3& h : s.history) EXPECT_EQ(h, Vec3(0, 2.0, 0));
  }
}

TEST(ForceWindowTest, ShortTrajectoriesYieldNothing) {
  const GaussianPolicy vision(TinyVision());
  nn::ParameterStore store;
  Rng rng(1);
  vision.Init(store, rng);
  EXPECT_TRUE(BuildForceWindows({ConstantForceTrajectory(8, 1.0)}, vision, store).empty());
  EXPECT_EQ(BuildForceWindows({ConstantForceTrajectory(9, 1.0)}, vision, store).size(), 1u);
}

ForceWindowSample Synthetic(Rng& rng) {
  ForceWindowSample s;
  s.latent = nn::Vec(8);
  for (int i = 0; i < 8; ++i) s.latent[i] = NormalDraw(rng);
  for (int i = 0; i < kActionDim; ++i) s.action_n[i] = 2 * UniformDraw(rng) - 1;
  for (Vec3& h : s.history) h = Vec3(NormalDraw(rng), NormalDraw(rng), NormalDraw(rng));
  s.target = 10.0 * s.action_n.norm();
  return s;
}

TEST(ForceDynamicsTest, LearnsActionMagnitudeRegression) {
  Rng rng(2);
  std::vector<ForceWindowSample> train, test;
  for (int i = 0; i < 10000; ++i) train.push_back(Synthetic(rng));
  for (int i = 0; i < 500; ++i) test.push_back(Synthetic(rng));
  ForceDynamicsConfig cfg;
  cfg.steps = 8000;
  ForceDynamics model(8, cfg);
  Rng init(3);
  model.Init(init);
  model.Train(train);

  double mean = 0.0;
  for (const auto& s : test) mean += s.target / test.size();
  double var = 0.0, mse = 0.0;
  for (const auto& s : test) {
    var += (s.target - mean) * (s.target - mean) / test.size();
    const double e = model.Predict(s.latent, s.action_n, s.history) - s.target;
    mse += e * e / test.size();
  }
  EXPECT_LT(mse, 0.05 * var);
}

TEST(ForceDynamicsTest, RejectsBadInput) {
  EXPECT_THROW(ForceDynamics(0), RangeError);
  ForceDynamics model(4);
  Rng rng(1);
  model.Init(rng);
  EXPECT_THROW(model.Predict(nn::Vec::Zero(5), Vec6::Zero(), {}), ContractError);
}

TEST(FcvpSelectTest, NoFilteringPicksMostLikely) {
  EXPECT_EQ(FcvpSelect({-3.0, -1.0, -2.0, -1.0}, {0, 0, 0, 0}, kFcvpThreshold), 1);
}

TEST(FcvpSelectTest, AllExceedPicksLowestPrediction) {
  EXPECT_EQ(FcvpSelect({-1.0, -2.0, -3.0}, {100, 100, 100}, kFcvpThreshold), 0);
  EXPECT_EQ(FcvpSelect({-1.0, -2.0, -3.0}, {120, 90, 100}, kFcvpThreshold), 1);
}

TEST(FcvpSelectTest, IndexStubKeepsFirstTwo) {
  const std::vector<double> predicted = {0, 1, 2, 3, 4};
  EXPECT_EQ(FcvpSelect({-5, -4, -3, -2, -1}, predicted, 1.5), 1);
  EXPECT_EQ(FcvpSelect({-1, -4, -3, -2, 0}, predicted, 1.5), 0);
}

TEST(FcvpSelectTest, NeverPicksAboveThresholdWhenOneSurvives) {
  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(IndexDraw(rng, 32));
    std::vector<double> lp(n), pred(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      lp[i] = NormalDraw(rng);
      pred[i] = 80 * UniformDraw(rng);
      any |= pred[i] <= kFcvpThreshold;
    }
    const int k = FcvpSelect(lp, pred, kFcvpThreshold);
    if (any) {
      EXPECT_LE(pred[k], kFcvpThreshold);
      for (int i = 0; i < n; ++i) {
        if (pred[i] <= kFcvpThreshold) EXPECT_GE(lp[k], lp[i]);
      }
    } else {
      for (int i = 0; i < n; ++i) EXPECT_LE(pred[k], pred[i]);
    }
  }
}

TEST(FcvpPolicyTest, ActsDeterministicallyAndWithinClip) {
  const GaussianPolicy vision(TinyVision());
  nn::ParameterStore store;
  Rng rng(5);
  vision.Init(store, rng);
  ForceDynamics dyn(vision.config().LatentWidth());
  dyn.Init(rng);
  FcvpPolicy policy(vision, store, dyn, 8);
  EnvConfig c;
  c.seed = 2;
  const Trajectory a = RunEpisode(policy, c);
  const Trajectory b = RunEpisode(policy, c);
  ASSERT_EQ(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a.steps[i].action, b.steps[i].action);
}

}  // namespace
}  // namespace dresslab
