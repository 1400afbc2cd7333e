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


#include "dresslab/distill.h"

#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "dresslab/expert.h"

namespace dresslab {
namespace {

const Vec3 kAnchor(0.0, 1.2, 0.0);

Vec3 RandomPoint(Rng& rng) {
  return Vec3(NormalDraw(rng), NormalDraw(rng), NormalDraw(rng));
}

// Sign of the planar determinant |a_x b_x; a_z b_z|.
int DetSign(const Vec3& a, const Vec3& b) {
  Eigen::Matrix2d m;
  m << a.x(), b.x(), a.z(), b.z();
  const double d = m.determinant();
  return (d > 0) - (d < 0);
}

int Sign(double v) { return (v > 0) - (v < 0); }

TEST(InnerSideTest, CollinearGripperIsNotInner) {
  TurnTestInput t{Vec3(0.6, 1.2, 0.0), Vec3(0.49, 1.2, 0.0), Vec3(0.26, 1.2, 0.0),
                  Vec3(0.0, 1.2, 0.0)};
  const TurnTestResult r = InnerSideTest(t);
  EXPECT_EQ(r.c1, 0.0);
  EXPECT_EQ(r.c2, 0.0);
  EXPECT_FALSE(r.inner);
}

TEST(InnerSideTest, MirroredGripperFlipsSigns) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    // Arm in the vertical plane z = 0; mirror the gripper across it.
    TurnTestInput t{RandomPoint(rng), Vec3(0.5, 1.0, 0.0), Vec3(0.25, 1.1, 0.0),
                    Vec3(0.0, 1.2, 0.0)};
    t.gripper.z() = 0.1 + std::abs(t.gripper.z());
    TurnTestInput m = t;
    m.gripper.z() = -t.gripper.z();
    const TurnTestResult a = InnerSideTest(t);
    const TurnTestResult b = InnerSideTest(m);
    EXPECT_EQ(Sign(a.c1), -Sign(b.c1));
    EXPECT_EQ(Sign(a.c2), -Sign(b.c2));
  }
}

TEST(InnerSideTest, AgreesWithDeterminantOracle) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    TurnTestInput t{RandomPoint(rng), RandomPoint(rng), RandomPoint(rng), RandomPoint(rng)};
    const TurnTestResult r = InnerSideTest(t, TurnTestVariant::kCrossXZ);
    const int s1 = DetSign(t.hand - t.gripper, t.hand - t.elbow);
    const int s2 = DetSign(t.elbow - t.gripper, t.elbow - t.shoulder);
    ASSERT_EQ(Sign(r.c1), s1) << i;
    ASSERT_EQ(Sign(r.c2), s2) << i;
    ASSERT_EQ(r.inner, s1 < 0 && s2 < 0) << i;
  }
}

TEST(InnerSideTest, DotVariantUsesDotProducts) {
  TurnTestInput t{Vec3(0.1, 0.2, 0.3), Vec3(1.0, 0.0, 0.0), Vec3(0.5, 0.5, 0.0),
                  Vec3(0.0, 1.0, 0.5)};
  const TurnTestResult r = InnerSideTest(t, TurnTestVariant::kDot);
  EXPECT_DOUBLE_EQ(r.c1, (t.hand - t.gripper).dot(t.hand - t.elbow));
  EXPECT_DOUBLE_EQ(r.c2, (t.elbow - t.gripper).dot(t.elbow - t.shoulder));
}

TEST(InnerSideTest, DegenerateArmThrows) {
  TurnTestInput t{Vec3::Zero(), Vec3::Ones(), Vec3::Ones(), Vec3::Zero()};
  EXPECT_THROW(InnerSideTest(t), ContractError);
}

struct BentArm {
  ArmPose arm = ForwardKinematics(DefaultDressingPose(), StandardBody(SizeClass::kMedium),
                                  kAnchor);
  // Unit vector from the elbow into the inside of the bend.
  Vec3 Inside() const {
    return ((arm.hand - arm.elbow).normalized() + (arm.shoulder - arm.elbow).normalized())
        .normalized();
  }
};

Trajectory OneStep(const ArmPose& arm, const Vec3& gripper, double deepest) {
  Trajectory t;
  t.steps.resize(1);
  t.steps[0].done = true;
  PrivilegedStep p;
  p.shoulder = arm.shoulder;
  p.elbow = arm.elbow;
  p.hand = arm.hand;
  p.gripper = gripper;
  p.deepest_threaded_s = deepest;
  t.privileged.push_back(p);
  t.meta.body = arm.body;
  return t;
}

TEST(DetectEarlyTurnTest, InnerStepAtElbowIsDetected) {
  BentArm b;
  const Vec3 g = b.arm.elbow + 0.03 * b.Inside();
  ASSERT_EQ(ComputeArcCoordinate(g, b.arm).region, ArmRegion::kElbowRegion);
  ASSERT_TRUE(InnerSideTest({g, b.arm.hand, b.arm.elbow, b.arm.shoulder}).inner);
  EXPECT_TRUE(DetectEarlyTurn(OneStep(b.arm, g, 0.3)));
  const Vec3 outer = b.arm.elbow - 0.03 * b.Inside();
  EXPECT_FALSE(DetectEarlyTurn(OneStep(b.arm, outer, 0.3)));
}

TEST(DetectEarlyTurnTest, RegionGate) {
  BentArm b;
  // Inner side, but next to the hand.
  const Vec3 g = b.arm.hand + 0.05 * (b.arm.elbow - b.arm.hand).normalized() +
                 0.03 * b.Inside();
  ASSERT_EQ(ComputeArcCoordinate(g, b.arm).region, ArmRegion::kForearm);
  EXPECT_FALSE(DetectEarlyTurn(OneStep(b.arm, g, 0.1)));
}

TEST(DetectEarlyTurnTest, EmptyTrajectory) { EXPECT_FALSE(DetectEarlyTurn(Trajectory{})); }

Trajectory WithUpperRatio(double ratio, bool early) {
  BentArm b;
  const BodySize& body = b.arm.body;
  double d = body.forearm_length + ratio * body.upperarm_length;
  // Smallest depth whose computed ratio reaches `ratio`.
  while (ComputeDressedRatios(d, body).upper < ratio) d = std::nextafter(d, 1.0);
  const Vec3 g = early ? Vec3(b.arm.elbow + 0.03 * b.Inside())
                       : Vec3(b.arm.hand + Vec3(0.05, 0.0, 0.0));
  return OneStep(b.arm, g, d);
}

TEST(FilterTrajectoriesTest, InclusiveThresholdAndConjunction) {
  std::vector<Trajectory> ts = {WithUpperRatio(0.69, false), WithUpperRatio(0.70, false),
                                WithUpperRatio(0.9, true), WithUpperRatio(0.9, false)};
  EXPECT_NEAR(ComputeDressedRatios(ts[1]).upper, 0.70, 1e-15);
  EXPECT_EQ(FilterTrajectories(ts), (std::vector<int>{1, 3}));
}

TEST(FilterTrajectoriesTest, SubsetAndIdempotent) {
  std::vector<Trajectory> ts;
  ExpertConfig ec;
  ec.early_turn_prob = 0.5;
  ScriptedExpert expert(ec);
  for (int i = 0; i < 12; ++i) {
    EnvConfig c;
    c.body = StandardBody(static_cast<SizeClass>(i % 4));
    c.seed = SplitSeed(3, i);
    ts.push_back(RunEpisode(expert, c));
  }
  const std::vector<int> keep = FilterTrajectories(ts);
  std::vector<Trajectory> kept;
  for (int i : keep) kept.push_back(ts[i]);
  const std::vector<int> again = FilterTrajectories(kept);
  ASSERT_EQ(again.size(), kept.size());
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i], static_cast<int>(i));
}

nn::PointNetConfig TinyPolicyConfig() {
  nn::PointNetConfig cfg = PolicyNetConfig(nn::ForceMode::kNone);
  cfg.sa_widths = {8, 16};
  cfg.global_width = 16;
  cfg.fp_widths = {16, 16, 8};
  cfg.head_hidden = {16};
  return cfg;
}

Observation ResetObservation(uint64_t seed) {
  EnvConfig c;
  c.seed = seed;
  DressingEnv env(c);
  env.Reset();
  return env.observation();
}

TEST(BcDistillTest, MemorizesOnePair) {
  GaussianPolicy pi(TinyPolicyConfig());
  const Observation obs = ResetObservation(1);
  Vec6 a;
  a << 0.5, -0.25, 0.75, 0.1, -0.2, 0.0;
  std::vector<BcSample> data(4, BcSample{&obs, a});
  BcConfig cfg{.steps = 1500, .lr = 3e-3, .batch = 4, .seed = 2};
  const BcResult r = BcDistill(pi, data, cfg);
  const Vec6 mean = pi.Forward(r.store, obs).mean;
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(mean[i], a[i], 1e-2) << i;
}

TEST(BcDistillTest, LossDecreasesInWindowedAverage) {
  ScriptedExpert expert;
  std::vector<Trajectory> ts;
  for (int i = 0; i < 10; ++i) {
    EnvConfig c;
    c.seed = SplitSeed(4, i);
    ts.push_back(RunEpisode(expert, c));
  }
  GaussianPolicy pi(TinyPolicyConfig());
  const std::vector<BcSample> data = CollectBcSamples(ts, pi.clip());
  BcConfig cfg{.steps = 500, .lr = 1e-3, .batch = 8, .seed = 5};
  const BcResult r = BcDistill(pi, data, cfg);
  std::vector<double> windows;
  for (int s = 0; s + 100 <= cfg.steps; s += 100) {
    double m = 0.0;
    for (int k = s; k < s + 100; ++k) m += r.loss[k] / 100.0;
    windows.push_back(m);
  }
  for (std::size_t i = 1; i < windows.size(); ++i) EXPECT_LE(windows[i], windows[i - 1]) << i;
}

TEST(BcDistillTest, EmptyDatasetFails) {
  GaussianPolicy pi(TinyPolicyConfig());
  EXPECT_THROW(BcDistill(pi, {}, BcConfig{}), ContractError);
}

TEST(BcDistillTest, DefaultScheduleMatchesReference) {
  const BcConfig cfg;
  EXPECT_EQ(cfg.steps, 40000);
  EXPECT_EQ(cfg.lr, 1e-4);
  EXPECT_EQ(cfg.batch, 128);
}

TEST(ExpertTest, LimitAngleClampsTowardAxis) {
  const Vec3 axis(1.0, 0.0, 0.0);
  const Vec3 d = Vec3(0.0, 1.0, 0.0);
  const Vec3 r = LimitAngle(d, axis, 0.5);
  EXPECT_NEAR(std::acos(r.dot(axis)), 0.5, 1e-12);
  EXPECT_NEAR(r.norm(), 1.0, 1e-12);
  const Vec3 inside = Vec3(1.0, 0.1, 0.0).normalized();
  EXPECT_LT((LimitAngle(inside, axis, 0.5) - inside).norm(), 1e-15);
}

TEST(ExpertTest, EarlyTurnVariantIsFilteredOut) {
  ExpertConfig ec;
  ec.early_turn_prob = 1.0;
  ScriptedExpert expert(ec);
  int flagged = 0;
  for (int i = 0; i < 10; ++i) {
    EnvConfig c;
    c.seed = SplitSeed(6, i);
    const Trajectory t = RunEpisode(expert, c);
    EXPECT_TRUE(expert.turning_early());
    flagged += DetectEarlyTurn(t);
  }
  EXPECT_GE(flagged, 9);
}

}  // namespace
}  // namespace dresslab
