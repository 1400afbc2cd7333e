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


#include "dresslab/environment.h"

#include <gtest/gtest.h>

#include "dresslab/expert.h"

namespace dresslab {
namespace {

EnvConfig StaticConfig(uint64_t seed) {
  EnvConfig c;
  c.domain = Domain::kSource;
  c.body = StandardBody(SizeClass::kMedium);
  c.seed = seed;
  return c;
}

// Always moves the gripper by a fixed vector.
class ConstantPolicy : public Policy {
 public:
  explicit ConstantPolicy(const Vec6& a) : a_(a) {}
  Vec6 Act(const Observation&, const PolicyContext&, Rng&) override { return a_; }

 private:
  Vec6 a_;
};

TEST(RunEpisodeTest, ZeroPolicyStopsOnNoProgress) {
  ZeroPolicy zero;
  for (uint64_t seed : {1, 2, 3}) {
    const Trajectory t = RunEpisode(zero, StaticConfig(seed));
    EXPECT_EQ(t.meta.reason, Termination::kNoProgress);
    // The first step plus ten stagnant ones.
    EXPECT_EQ(t.size(), 11);
    EXPECT_TRUE(t.steps.back().done);
    EXPECT_NO_THROW(t.Validate());
  }
}

TEST(RunEpisodeTest, ExpertDressesStraightArmWithWideGarment) {
  EnvConfig c = StaticConfig(5);
  c.base_pose = JointState{};
  c.offsets = OffsetBox{0.0, 0.0};
  c.garment = GarmentProfile("wide");
  ExpertConfig ec;
  ec.noise = 0.0;
  ec.rotation_noise = 0.0;
  ScriptedExpert expert(ec);
  const Trajectory t = RunEpisode(expert, c);
  EXPECT_EQ(t.meta.reason, Termination::kShoulderReached);
  EXPECT_DOUBLE_EQ(ComputeDressedRatios(t).upper, 1.0);
}

TEST(RunEpisodeTest, ZeroForceStopEndsAtFirstContact) {
  EnvConfig c = StaticConfig(6);
  c.force_stop = 0.0;
  ScriptedExpert expert;
  const Trajectory t = RunEpisode(expert, c);
  ASSERT_FALSE(t.empty());
  EXPECT_EQ(t.meta.reason, Termination::kForceLimit);
  for (int i = 0; i + 1 < t.size(); ++i) EXPECT_EQ(t.privileged[i].raw_force.norm(), 0.0);
  EXPECT_GT(t.privileged.back().raw_force.norm(), 0.0);
}

TEST(RunEpisodeTest, MaxStepsCapsTheEpisode) {
  EnvConfig c = StaticConfig(7);
  c.max_steps = 4;
  ScriptedExpert expert;
  const Trajectory t = RunEpisode(expert, c);
  EXPECT_EQ(t.size(), 4);
  EXPECT_EQ(t.meta.reason, Termination::kMaxSteps);
}

TEST(RunEpisodeTest, ActionsAreClippedAndQuantized) {
  Vec6 big;
  big << 1.0, -1.0, 0.5, 2.0, -2.0, 0.05;
  ConstantPolicy policy(big);
  const Trajectory t = RunEpisode(policy, StaticConfig(8));
  ASSERT_FALSE(t.empty());
  Vec6 expect;
  expect << 0.02, -0.02, 0.02, 0.1, -0.1, 0.05;
  EXPECT_EQ(t.steps[0].action, QuantizeAction(expect));
}

TEST(RunEpisodeTest, SameSeedSameBytes) {
  ScriptedExpert a, b;
  EnvConfig c = StaticConfig(9);
  c.domain = Domain::kTarget;
  c.motion = DefaultMotion(MotionName::kOpenArm);
  EXPECT_EQ(SerializeTrajectory(RunEpisode(a, c)), SerializeTrajectory(RunEpisode(b, c)));
}

TEST(RunEpisodeTest, ObservationsCarryTheCurrentRawForce) {
  ScriptedExpert expert;
  const Trajectory t = RunEpisode(expert, StaticConfig(10));
  for (int i = 1; i < t.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(t.steps[i].obs.force.raw[k], Quantize(t.privileged[i - 1].raw_force[k]));
    }
  }
}

TEST(ClipActionTest, PerAxis) {
  Vec6 a;
  a << 0.03, -0.01, -0.5, 0.05, 0.2, -0.3;
  const Vec6 c = ClipAction(a, ActionClip{});
  Vec6 e;
  e << 0.02, -0.01, -0.02, 0.05, 0.1, -0.1;
  EXPECT_EQ(c, e);
}

TEST(DressedRatiosTest, Examples) {
  const BodySize m = StandardBody(SizeClass::kMedium);
  DressedRatios none = ComputeDressedRatios(0.0, m);
  EXPECT_EQ(none.upper, 0.0);
  EXPECT_EQ(none.whole, 0.0);
  DressedRatios full = ComputeDressedRatios(m.TotalLength(), m);
  EXPECT_DOUBLE_EQ(full.upper, 1.0);
  EXPECT_DOUBLE_EQ(full.whole, 1.0);
  DressedRatios mid = ComputeDressedRatios(0.30, m);
  EXPECT_NEAR(mid.upper, 0.07 / 0.26, 1e-12);
  EXPECT_NEAR(mid.whole, 0.30 / 0.49, 1e-12);
}

TEST(DressedRatiosTest, BoundsHold) {
  for (SizeClass s : {SizeClass::kSmall, SizeClass::kXLarge}) {
    const BodySize b = StandardBody(s);
    for (double d = -0.1; d < 0.8; d += 0.01) {
      const DressedRatios r = ComputeDressedRatios(d, b);
      EXPECT_GE(r.upper, 0.0);
      EXPECT_LE(r.upper, 1.0);
      EXPECT_GE(r.whole, 0.0);
      EXPECT_LE(r.whole, 1.0);
      EXPECT_GE(r.whole + 1e-12, r.upper * b.upperarm_length / b.TotalLength());
    }
  }
}

TEST(EnvConfigTest, HashIgnoresSeedOnly) {
  EnvConfig a = StaticConfig(1);
  EnvConfig b = StaticConfig(2);
  EXPECT_EQ(a.Hash(), b.Hash());
  b.force_stop = 17.0;
  EXPECT_NE(a.Hash(), b.Hash());
}

}  // namespace
}  // namespace dresslab
