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

#ifndef DRESSLAB_ENVIRONMENT_H_
#define DRESSLAB_ENVIRONMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dresslab/arm_kinematics.h"
#include "dresslab/garment.h"
#include "dresslab/sensing.h"
#include "dresslab/trajectory.h"

namespace dresslab {

struct ActionClip {
  double translation = 0.02;  // m per step, per axis
  double rotation = 0.1;      // rad per step, per axis
};

Vec6 ClipAction(const Vec6& a, const ActionClip& clip);

struct EnvConfig {
  Domain domain = Domain::kSource;
  BodySize body;
  std::optional<MotionSpec> motion;  // empty: static arm
  int motion_start_step = 0;
  // Base profile; TARGET applies ToTargetDomain at reset.
  GarmentSpec garment = GarmentProfile("standard");
  int max_steps = 250;
  double force_stop = 18.0;  // N, on |raw force|
  int no_progress_window = 10;
  double no_progress_eps = 0.001;  // m of depth gain over the window
  ActionClip clip;
  PointBudget budget;
  double ema_alpha = 0.5;
  JointState base_pose = DefaultDressingPose();
  OffsetBox offsets;  // initial-pose randomization; zero box keeps base_pose
  Vec3 shoulder_anchor = Vec3(0.0, 1.2, 0.0);
  double grasp_offset = 0.03;  // gripper starts this far past the hand tip
  uint64_t seed = 0;

  // Garment actually simulated (domain transform applied).
  GarmentSpec EffectiveGarment() const;
  std::string MotionLabel() const;
  // Stable hash of every field except `seed`.
  uint64_t Hash() const;
};

// Everything a policy may look at. Learned policies use only `obs`; the
// scripted expert and oracles read the privileged fields.
struct PolicyContext {
  int step = 0;
  const EnvConfig* config = nullptr;
  const GarmentSpec* garment_spec = nullptr;
  const ArmPose* arm = nullptr;
  const GarmentState* garment = nullptr;
  Vec3 gripper = Vec3::Zero();
  // Raw force samples observed so far, oldest first; the last entry is
  // obs.force.raw.
  const std::vector<Vec3>* force_history = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void Reset(uint64_t /*episode_seed*/) {}
  virtual Vec6 Act(const Observation& obs, const PolicyContext& ctx,
                   Rng& rng) = 0;
};

class ZeroPolicy : public Policy {
 public:
  Vec6 Act(const Observation&, const PolicyContext&, Rng&) override {
    return Vec6::Zero();
  }
};

// Single-episode simulator. Random streams (initial pose, rendering, force
// noise, policy) are split from config.seed.
class DressingEnv {
 public:
  explicit DressingEnv(EnvConfig config);

  void Reset();
  // Applies one clipped action; returns the termination reason (kNone while
  // running).
  Termination Step(const Vec6& action);

  const Observation& observation() const { return obs_; }
  PolicyContext Context() const;
  PrivilegedStep Privileged() const;
  const EnvConfig& config() const { return config_; }
  const ArmPose& arm() const { return arm_; }
  const GarmentState& garment() const { return garment_; }
  const GarmentSpec& garment_spec() const { return spec_; }
  const Vec3& gripper() const { return garment_.grasp.position; }
  int step() const { return step_; }
  const Vec6& last_action() const { return last_action_; }
  const JointState& initial_joints() const { return init_joints_; }
  Rng& policy_rng() { return policy_rng_; }

 private:
  JointState JointsAt(int step) const;
  void Observe();

  EnvConfig config_;
  GarmentSpec spec_;
  std::vector<JointState> frames_;
  JointState init_joints_;
  ArmPose arm_;
  GarmentState garment_;
  Rng render_rng_, noise_rng_, policy_rng_;
  Observation obs_;
  Vec3 raw_force_ = Vec3::Zero();
  std::optional<Vec3> smoothed_;
  std::vector<Vec3> force_history_;
  std::vector<double> depth_history_;
  Vec6 last_action_ = Vec6::Zero();
  int step_ = 0;
};

// Runs one episode to termination. Observations, actions and forces are
// stored at 32-bit precision; rewards are left at zero for reward labeling.
Trajectory RunEpisode(Policy& policy, const EnvConfig& config);

struct DressedRatios {
  double upper = 0.0;
  double whole = 0.0;
};

DressedRatios ComputeDressedRatios(double deepest_threaded_s,
                                   const BodySize& body);
// From the final step's privileged depth.
DressedRatios ComputeDressedRatios(const Trajectory& t);

}  // namespace dresslab

#endif  // DRESSLAB_ENVIRONMENT_H_
