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

#include <algorithm>
#include <bit>
#include <cmath>

namespace dresslab {
namespace {

enum Stream : uint64_t { kInitStream = 0, kRenderStream, kNoiseStream, kPolicyStream };

class Hasher {
 public:
  void Add(uint64_t v) { h_ = MixSeed(h_ ^ v); }
  void Add(double v) { Add(std::bit_cast<uint64_t>(v)); }
  void Add(int v) { Add(static_cast<uint64_t>(static_cast<int64_t>(v))); }
  void Add(const std::string& s) {
    Add(static_cast<uint64_t>(s.size()));
    for (char c : s) Add(static_cast<uint64_t>(static_cast<unsigned char>(c)));
  }
  void Add(const JointState& j) {
    Add(j.shoulder_abduction);
    Add(j.shoulder_flexion);
    Add(j.shoulder_rotation);
    Add(j.elbow_flexion);
  }
  uint64_t value() const { return h_; }

 private:
  uint64_t h_ = 0x44524553534C4142ULL;
};

}  // namespace

Vec6 ClipAction(const Vec6& a, const ActionClip& clip) {
  Vec6 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = std::clamp(a[i], -clip.translation, clip.translation);
    out[i + 3] = std::clamp(a[i + 3], -clip.rotation, clip.rotation);
  }
  return out;
}

GarmentSpec EnvConfig::EffectiveGarment() const {
  return domain == Domain::kTarget ? ToTargetDomain(garment) : garment;
}

std::string EnvConfig::MotionLabel() const {
  return motion ? motion->Label() : "static";
}

uint64_t EnvConfig::Hash() const {
  Hasher h;
  h.Add(static_cast<uint64_t>(domain));
  h.Add(body.forearm_radius);
  h.Add(body.forearm_length);
  h.Add(body.upperarm_radius);
  h.Add(body.upperarm_length);
  h.Add(static_cast<int>(body.size_class));
  h.Add(MotionLabel());
  if (motion) {
    h.Add(motion->start);
    h.Add(motion->target);
    h.Add(motion->steps);
  }
  h.Add(motion_start_step);
  h.Add(garment.name);
  h.Add(garment.ring_count);
  for (double r : garment.ring_radius) h.Add(r);
  h.Add(garment.rest_spacing);
  h.Add(garment.spring_k);
  h.Add(garment.snag_clearance);
  h.Add(garment.n_relax);
  h.Add(garment.noise_sigma);
  h.Add(garment.elbow_pass_threshold);
  h.Add(max_steps);
  h.Add(force_stop);
  h.Add(no_progress_window);
  h.Add(no_progress_eps);
  h.Add(clip.translation);
  h.Add(clip.rotation);
  h.Add(budget.n_garment);
  h.Add(budget.n_arm);
  h.Add(ema_alpha);
  h.Add(base_pose);
  h.Add(offsets.elbow);
  h.Add(offsets.hand);
  for (int i = 0; i < 3; ++i) h.Add(shoulder_anchor[i]);
  h.Add(grasp_offset);
  return h.value();
}

DressingEnv::DressingEnv(EnvConfig config) : config_(std::move(config)) {
  if (config_.max_steps < 1) throw RangeError("max_steps must be >= 1");
  if (config_.no_progress_window < 1) {
    throw RangeError("no_progress_window must be >= 1");
  }
  if (config_.motion_start_step < 0) {
    throw RangeError("motion_start_step must be >= 0");
  }
  config_.body.Validate();
  Reset();
}

void DressingEnv::Reset() {
  spec_ = config_.EffectiveGarment();
  spec_.Validate();
  const uint64_t seed = config_.seed;
  Rng init_rng(SplitSeed(seed, kInitStream));
  render_rng_.seed(SplitSeed(seed, kRenderStream));
  noise_rng_.seed(SplitSeed(seed, kNoiseStream));
  policy_rng_.seed(SplitSeed(seed, kPolicyStream));

  init_joints_ = SampleInitialConfig(init_rng, config_.base_pose, config_.body,
                                     config_.shoulder_anchor, config_.offsets);
  frames_.clear();
  if (config_.motion) frames_ = InterpolateMotion(*config_.motion);
  step_ = 0;
  arm_ = ForwardKinematics(JointsAt(0), config_.body, config_.shoulder_anchor);
  GraspPose grasp{PointAtArc(arm_, -config_.grasp_offset), Vec3::Zero()};
  garment_ = InitGarment(spec_, arm_, grasp);
  raw_force_ = Vec3::Zero();
  smoothed_ = EmaForce(std::nullopt, raw_force_, config_.ema_alpha);
  force_history_.clear();
  depth_history_.assign(1, garment_.deepest_threaded_s);
  last_action_ = Vec6::Zero();
  Observe();
}

JointState DressingEnv::JointsAt(int step) const {
  if (frames_.empty() || step <= config_.motion_start_step) return init_joints_;
  const int k = std::min(step - config_.motion_start_step,
                         static_cast<int>(frames_.size()) - 1);
  return (init_joints_ + (frames_[k] - frames_[0])).Clamped();
}

void DressingEnv::Observe() {
  obs_ = RenderPointCloud(arm_, spec_, garment_, gripper(), config_.budget,
                          render_rng_);
  obs_.force.raw = raw_force_;
  obs_.force.smoothed = *smoothed_;
  QuantizeObservation(obs_);
  force_history_.push_back(obs_.force.raw);
}

PolicyContext DressingEnv::Context() const {
  PolicyContext ctx;
  ctx.step = step_;
  ctx.config = &config_;
  ctx.garment_spec = &spec_;
  ctx.arm = &arm_;
  ctx.garment = &garment_;
  ctx.gripper = gripper();
  ctx.force_history = &force_history_;
  return ctx;
}

PrivilegedStep DressingEnv::Privileged() const {
  PrivilegedStep p;
  p.shoulder = arm_.shoulder;
  p.elbow = arm_.elbow;
  p.hand = arm_.hand;
  p.gripper = garment_.grasp.position;
  p.gripper_rotation = garment_.grasp.rotation;
  p.deepest_threaded_s = garment_.deepest_threaded_s;
  p.raw_force = raw_force_;
  return p;
}

Termination DressingEnv::Step(const Vec6& action) {
  last_action_ = QuantizeAction(ClipAction(action, config_.clip));
  ++step_;
  arm_ = ForwardKinematics(JointsAt(step_), config_.body,
                           config_.shoulder_anchor);
  RigidDelta delta{last_action_.head<3>(), last_action_.tail<3>()};
  GarmentStep next = StepGarment(spec_, garment_, delta, arm_, &noise_rng_);
  garment_ = std::move(next.state);
  raw_force_ = next.raw_force;
  smoothed_ = EmaForce(smoothed_, raw_force_, config_.ema_alpha);
  depth_history_.push_back(garment_.deepest_threaded_s);

  Termination reason = Termination::kNone;
  const int w = config_.no_progress_window;
  if (garment_.deepest_threaded_s >= config_.body.TotalLength() - 0.01) {
    reason = Termination::kShoulderReached;
  } else if (raw_force_.norm() > config_.force_stop) {
    reason = Termination::kForceLimit;
  } else if (step_ > w && depth_history_[step_] - depth_history_[step_ - w] <
                              config_.no_progress_eps) {
    reason = Termination::kNoProgress;
  } else if (step_ >= config_.max_steps) {
    reason = Termination::kMaxSteps;
  }
  if (reason == Termination::kNone) Observe();
  return reason;
}

Trajectory RunEpisode(Policy& policy, const EnvConfig& config) {
  DressingEnv env(config);
  policy.Reset(config.seed);
  Trajectory t;
  t.meta.config_hash = config.Hash();
  t.meta.seed = config.seed;
  t.meta.domain = config.domain;
  t.meta.body = config.body;
  t.meta.garment = config.garment.name;
  t.meta.motion = config.MotionLabel();
  t.meta.initial_deepest_s = env.garment().deepest_threaded_s;
  t.steps.reserve(config.max_steps);
  t.privileged.reserve(config.max_steps);
  while (true) {
    TrajectoryStep s;
    s.obs = env.observation();
    Vec6 a = policy.Act(s.obs, env.Context(), env.policy_rng());
    Termination reason = env.Step(a);
    s.action = env.last_action();
    s.done = reason != Termination::kNone;
    t.steps.push_back(std::move(s));
    t.privileged.push_back(env.Privileged());
    if (reason != Termination::kNone) {
      t.meta.reason = reason;
      break;
    }
  }
  return t;
}

DressedRatios ComputeDressedRatios(double deepest_threaded_s,
                                   const BodySize& body) {
  DressedLengths d = ComputeDressedLengths(deepest_threaded_s, body);
  return {d.upperarm / body.upperarm_length,
          (d.forearm + d.upperarm) / body.TotalLength()};
}

DressedRatios ComputeDressedRatios(const Trajectory& t) {
  return ComputeDressedRatios(t.FinalDeepest(), t.meta.body);
}

}  // namespace dresslab
