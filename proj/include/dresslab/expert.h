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

#ifndef DRESSLAB_EXPERT_H_
#define DRESSLAB_EXPERT_H_

#include "dresslab/environment.h"

namespace dresslab {

struct ExpertConfig {
  double lookahead = 0.08;       // m along the arm ahead of the leading ring
  double lead = 0.02;            // pull distance beyond rest spacing, m
  double max_pull_angle = 0.55;  // rad between pull and local arm tangent
  double step = 0.02;            // m per step
  double noise = 0.003;          // m, per axis
  double rotation_noise = 0.01;  // rad, per axis
  // Lateral offset toward the outside of the elbow bend while the gripper
  // is in (or within 5 cm of) the elbow region.
  double outer_offset = 0.015;
  // Fraction of episodes that cut the corner at the elbow.
  double early_turn_prob = 0.0;
  double early_turn_lookahead = 0.25;
};

// Privileged geometric controller: approach along the forearm axis, then
// keep the leading ring pulled toward a point further up the arm with the
// pull direction held near the local tangent, passing the elbow on its
// outer side. Rotation commands are pure noise.
class ScriptedExpert : public Policy {
 public:
  explicit ScriptedExpert(ExpertConfig config = {}) : config_(config) {}

  void Reset(uint64_t episode_seed) override;
  Vec6 Act(const Observation& obs, const PolicyContext& ctx, Rng& rng) override;

  bool turning_early() const { return early_; }

 private:
  ExpertConfig config_;
  bool early_ = false;
};

// Rotates unit vector `d` toward unit vector `axis` so the angle between
// them is at most `max_angle`.
Vec3 LimitAngle(const Vec3& d, const Vec3& axis, double max_angle);

}  // namespace dresslab

#endif  // DRESSLAB_EXPERT_H_
