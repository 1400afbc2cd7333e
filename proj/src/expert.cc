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

#include "dresslab/expert.h"

#include <algorithm>
#include <cmath>

namespace dresslab {

Vec3 LimitAngle(const Vec3& d, const Vec3& axis, double max_angle) {
  const double c = std::clamp(d.dot(axis), -1.0, 1.0);
  if (std::acos(c) <= max_angle) return d;
  Vec3 perp = d - c * axis;
  if (perp.norm() < 1e-12) return axis;
  perp.normalize();
  return std::cos(max_angle) * axis + std::sin(max_angle) * perp;
}

void ScriptedExpert::Reset(uint64_t episode_seed) {
  Rng rng(SplitSeed(episode_seed, 0xE7));
  early_ = UniformDraw(rng) < config_.early_turn_prob;
}

Vec6 ScriptedExpert::Act(const Observation&, const PolicyContext& ctx,
                         Rng& rng) {
  if (ctx.arm == nullptr || ctx.garment == nullptr ||
      ctx.garment_spec == nullptr) {
    throw ContractError("scripted expert needs privileged state");
  }
  const ArmPose& arm = *ctx.arm;
  const GarmentState& g = *ctx.garment;
  const Vec3& gripper = ctx.gripper;
  Vec3 target;
  const int k = g.DeepestThreaded();
  if (k < 0) {
    // Slide along the forearm axis, correcting any lateral offset.
    double s = (gripper - arm.hand).dot(arm.ForearmDirection());
    s = std::min(s, arm.body.forearm_length);
    target = PointAtArc(arm, s + config_.step);
  } else {
    const double s = g.ring_s[k];
    const bool cut = early_ && RegionForArc(s, arm.body) == ArmRegion::kElbowRegion;
    const double ahead = cut ? config_.early_turn_lookahead : config_.lookahead;
    Vec3 d = (PointAtArc(arm, s + ahead) - g.centers[k]).normalized();
    if (!cut) d = LimitAngle(d, TangentAtArc(arm, s), config_.max_pull_angle);
    target = g.centers[k] + (ctx.garment_spec->rest_spacing + config_.lead) * d;
    const Vec3 bisector = (arm.hand - arm.elbow).normalized() +
                          (arm.shoulder - arm.elbow).normalized();
    // Start shifting out a little before the gripper reaches the region.
    const double gs = ComputeArcCoordinate(gripper, arm).s;
    const double lo = 0.75 * arm.body.forearm_length - 0.05;
    const double hi = arm.body.forearm_length + 0.25 * arm.body.upperarm_length;
    if (!cut && bisector.norm() > 1e-6 && gs >= lo && gs <= hi) {
      target -= config_.outer_offset * bisector.normalized();
    }
  }
  Vec3 move = target - gripper;
  const double n = move.norm();
  if (n > config_.step) move *= config_.step / n;
  for (int i = 0; i < 3; ++i) move[i] += config_.noise * NormalDraw(rng);
  Vec6 a = Vec6::Zero();
  a.head<3>() = move;
  for (int i = 3; i < 6; ++i) a[i] = config_.rotation_noise * NormalDraw(rng);
  return a;
}

}  // namespace dresslab
