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

#include "dresslab/garment.h"

#include <cstring>

#include <gtest/gtest.h>

namespace dresslab {
namespace {

const Vec3 kAnchor(0.0, 1.2, 0.0);

GarmentSpec Quiet(GarmentSpec g) {
  g.noise_sigma = 0.0;
  return g;
}

ArmPose StraightArm() {
  return ForwardKinematics(JointState{}, StandardBody(SizeClass::kMedium),
                           kAnchor);
}

// Gripper `ahead` meters beyond the hand tip on the forearm axis.
GraspPose GraspBeyondHand(const ArmPose& arm, double ahead) {
  return {PointAtArc(arm, -ahead), Vec3::Zero()};
}

bool ThreadedRunEndsBelowGrasp(const GarmentState& st) {
  const int n = st.RingCount();
  if (st.threaded[n - 1]) return false;
  bool seen_unthreaded = false;
  for (int i = n - 2; i >= 0; --i) {
    if (!st.threaded[i]) seen_unthreaded = true;
    else if (seen_unthreaded) return false;
  }
  return true;
}

TEST(InitGarmentTest, ChainStartsRelaxedAndUnthreaded) {
  GarmentSpec spec = GarmentProfile("standard");
  ArmPose arm = StraightArm();
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  ASSERT_EQ(st.RingCount(), 12);
  for (uint8_t t : st.threaded) EXPECT_EQ(t, 0);
  EXPECT_EQ(st.deepest_threaded_s, 0.0);
  EXPECT_NEAR((st.centers.back() - st.centers.front()).norm(), 0.55, 1e-12);
  EXPECT_EQ(st.centers.back(), st.grasp.position);
  EXPECT_NEAR(SpacingError(spec, st), 0.0, 1e-24);
}

TEST(InitGarmentTest, RejectsDistantGrasp) {
  ArmPose arm = StraightArm();
  GraspPose far{arm.hand + Vec3(0.0, 0.41, 0.0), Vec3::Zero()};
  EXPECT_THROW(InitGarment(GarmentProfile("standard"), arm, far), ContractError);
}

TEST(GarmentSpecTest, ProfilesAndTargetDomain) {
  for (const auto& name : GarmentProfileNames()) {
    GarmentSpec g = GarmentProfile(name);
    EXPECT_NO_THROW(g.Validate());
    GarmentSpec t = ToTargetDomain(g);
    EXPECT_EQ(t.spring_k, 80.0);
    EXPECT_EQ(t.noise_sigma, 0.4);
    for (int i = 0; i < g.ring_count; ++i) {
      EXPECT_DOUBLE_EQ(t.ring_radius[i], 0.85 * g.ring_radius[i]);
    }
  }
  EXPECT_EQ(GarmentProfile("short").rest_spacing, 0.04);
  EXPECT_THROW(GarmentProfile("poncho"), RangeError);
  GarmentSpec bad = GarmentProfile("standard");
  bad.ring_count = 3;
  EXPECT_THROW(bad.Validate(), RangeError);
}

TEST(StepGarmentTest, SlackChainHasNoForce) {
  GarmentSpec spec = Quiet(GarmentProfile("standard"));
  ArmPose arm = StraightArm();
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  GarmentStep out = StepGarment(spec, st, RigidDelta{}, arm, nullptr);
  EXPECT_EQ(out.raw_force, Vec3::Zero());
  EXPECT_FALSE(out.snagged);
}

TEST(StepGarmentTest, NoiseWithoutRngIsRejected) {
  GarmentSpec spec = GarmentProfile("standard");
  ArmPose arm = StraightArm();
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  EXPECT_THROW(StepGarment(spec, st, RigidDelta{}, arm, nullptr), ContractError);
}

TEST(ChainForceTest, SpringLawOnAStretchedLink) {
  GarmentSpec spec = Quiet(GarmentProfile("standard"));
  ArmPose arm = StraightArm();
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  const int n = st.RingCount();
  st.threaded[n - 2] = 1;
  st.ring_s[n - 2] = 0.1;
  st.centers[n - 2] = PointAtArc(arm, 0.1);
  st.centers[n - 1] = st.centers[n - 2] + Vec3(0.15, 0.0, 0.0);
  Vec3 f = ChainForce(spec, st);
  EXPECT_NEAR(f.norm(), 5.0, 1e-12);
  // Points from the gripper back toward the threaded ring.
  EXPECT_NEAR(f.x(), -5.0, 1e-12);
}

TEST(StepGarmentTest, PinnedRingProducesSpringForce) {
  // The ring next to the grasp fits the forearm but not the upper arm, so it
  // is pinned just before the elbow while the gripper keeps going.
  GarmentSpec spec = Quiet(GarmentProfile("wide"));
  ArmPose arm = StraightArm();
  const int n = spec.ring_count;
  spec.ring_radius[n - 2] = 0.05;
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  const Vec3 dir = -arm.ForearmDirection();
  const double target_s = arm.body.forearm_length + 0.15;
  GarmentStep out{st, Vec3::Zero(), false};
  bool snagged = false;
  for (int k = 0; k < 200; ++k) {
    double gs = ComputeArcCoordinate(out.state.grasp.position, arm, 1e9).s;
    // Gripper s is measured on the axis; straight arm so it is linear.
    double remaining = target_s - (gs > 0 ? gs : -(out.state.grasp.position -
                                                   arm.hand).norm());
    if (remaining <= 1e-12) break;
    RigidDelta d;
    d.translation = -dir * std::min(0.02, remaining);
    out = StepGarment(spec, out.state, d, arm, nullptr);
    snagged |= out.snagged;
  }
  ASSERT_TRUE(snagged);
  ASSERT_TRUE(out.state.threaded[n - 2]);
  EXPECT_NEAR(out.state.ring_s[n - 2], arm.body.forearm_length, 1e-6);
  // 50 N/m * (0.15 - 0.05) m.
  EXPECT_NEAR(out.raw_force.norm(), 5.0, 1e-4);
  EXPECT_GT(out.raw_force.dot(dir), 0.0);
}

TEST(StepGarmentTest, ProgressTracksGripperOnStraightArm) {
  GarmentSpec spec = Quiet(GarmentProfile("wide"));
  ArmPose arm = StraightArm();
  GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  RigidDelta d;
  d.translation = arm.ForearmDirection() * 0.02;
  for (int k = 0; k < 6; ++k) st = StepGarment(spec, st, d, arm, nullptr).state;
  ASSERT_GT(st.deepest_threaded_s, 0.0);
  const double before = st.deepest_threaded_s;
  const double travel = 0.30;
  for (int k = 0; k < 15; ++k) st = StepGarment(spec, st, d, arm, nullptr).state;
  EXPECT_NEAR(st.deepest_threaded_s - before, travel, 0.1 * travel);
}

TEST(StepGarmentTest, DeterministicWithoutNoise) {
  GarmentSpec spec = Quiet(GarmentProfile("standard"));
  ArmPose arm = ForwardKinematics(DefaultDressingPose(), BodySize{}, kAnchor);
  GarmentState a = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
  GarmentState b = a;
  RigidDelta d;
  d.translation = Vec3(0.011, -0.004, 0.007);
  d.rotation = Vec3(0.0, 0.05, 0.0);
  for (int k = 0; k < 30; ++k) {
    GarmentStep sa = StepGarment(spec, a, d, arm, nullptr);
    GarmentStep sb = StepGarment(spec, b, d, arm, nullptr);
    for (int i = 0; i < a.RingCount(); ++i) {
      ASSERT_EQ(std::memcmp(sa.state.centers[i].data(),
                            sb.state.centers[i].data(), sizeof(double) * 3),
                0);
    }
    ASSERT_EQ(std::memcmp(sa.raw_force.data(), sb.raw_force.data(),
                          sizeof(double) * 3),
              0);
    a = sa.state;
    b = sb.state;
  }
}

// Random walks over random arms and garments: checks the threaded-run
// invariant, the deepest-arc bookkeeping, monotone progress and zero force
// without stretch.
TEST(StepGarmentTest, RandomStepInvariants) {
  Rng rng(1234);
  const auto names = GarmentProfileNames();
  int steps = 0, threaded_steps = 0;
  while (steps < 10000) {
    BodySize body = StandardBody(static_cast<SizeClass>(IndexDraw(rng, 4)));
    JointState j = SampleInitialConfig(rng, DefaultDressingPose(), body, kAnchor);
    ArmPose arm = ForwardKinematics(j, body, kAnchor);
    GarmentSpec spec = Quiet(GarmentProfile(names[IndexDraw(rng, names.size())]));
    if (UniformDraw(rng) < 0.5) spec = Quiet(ToTargetDomain(spec));
    GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
    double prev = 0.0;
    for (int k = 0; k < 100 && steps < 10000; ++k, ++steps) {
      RigidDelta d;
      // Biased toward the shoulder so that threading actually happens.
      Vec3 noise(NormalDraw(rng), NormalDraw(rng), NormalDraw(rng));
      Vec3 toward = TangentAtArc(arm, std::max(0.0, st.deepest_threaded_s));
      d.translation = 0.012 * toward + 0.008 * noise;
      GarmentStep out = StepGarment(spec, st, d, arm, nullptr);
      st = out.state;
      ASSERT_TRUE(ThreadedRunEndsBelowGrasp(st));
      double deepest = 0.0;
      for (int i = 0; i < st.RingCount(); ++i) {
        if (st.threaded[i]) deepest = std::max(deepest, st.ring_s[i]);
      }
      ASSERT_EQ(st.deepest_threaded_s, deepest);
      ASSERT_GE(st.deepest_threaded_s, prev);
      ASSERT_LE(st.deepest_threaded_s, body.TotalLength());
      prev = st.deepest_threaded_s;
      int kdeep = st.DeepestThreaded();
      if (kdeep >= 0) {
        ++threaded_steps;
        double len = 0.0;
        for (int i = kdeep; i + 1 < st.RingCount(); ++i) {
          len += (st.centers[i + 1] - st.centers[i]).norm();
        }
        if (len <= (st.RingCount() - 1 - kdeep) * spec.rest_spacing) {
          ASSERT_EQ(out.raw_force, Vec3::Zero());
        }
      } else {
        ASSERT_EQ(out.raw_force, Vec3::Zero());
      }
    }
  }
  EXPECT_GT(threaded_steps, 2000);
}

TEST(RelaxOnceTest, NeverIncreasesSpacingError) {
  Rng rng(99);
  for (int t = 0; t < 500; ++t) {
    GarmentSpec spec = Quiet(GarmentProfile("standard"));
    ArmPose arm = ForwardKinematics(DefaultDressingPose(), BodySize{}, kAnchor);
    GarmentState st = InitGarment(spec, arm, GraspBeyondHand(arm, 0.03));
    for (Vec3& c : st.centers) {
      c += 0.03 * Vec3(NormalDraw(rng), NormalDraw(rng), NormalDraw(rng));
    }
    st.centers.back() = st.grasp.position;
    for (int it = 0; it < 8; ++it) {
      const double before = SpacingError(spec, st);
      bool snagged = false;
      bool applied = RelaxOnce(spec, arm, st, snagged);
      ASSERT_LE(SpacingError(spec, st), before);
      if (!applied) break;
    }
  }
}

TEST(DressedLengthsTest, ClampArithmetic) {
  BodySize body = StandardBody(SizeClass::kMedium);
  DressedLengths zero = ComputeDressedLengths(0.0, body);
  EXPECT_EQ(zero.forearm, 0.0);
  EXPECT_EQ(zero.upperarm, 0.0);
  DressedLengths full = ComputeDressedLengths(body.TotalLength(), body);
  EXPECT_EQ(full.forearm, body.forearm_length);
  EXPECT_DOUBLE_EQ(full.upperarm, body.upperarm_length);
  DressedLengths mid = ComputeDressedLengths(0.30, body);
  EXPECT_DOUBLE_EQ(mid.forearm, 0.23);
  EXPECT_NEAR(mid.upperarm, 0.07, 1e-15);
}

}  // namespace
}  // namespace dresslab
