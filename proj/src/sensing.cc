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

#include "dresslab/sensing.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dresslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Any orthonormal pair spanning the plane normal to `axis`.
void PlaneBasis(const Vec3& axis, Vec3& e1, Vec3& e2) {
  Vec3 a = axis.normalized();
  Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = a.cross(helper).normalized();
  e2 = a.cross(e1);
}

// Picks exactly `n` items from `pool`: a random subset when the pool is large
// enough, otherwise all of it plus draws with replacement.
std::vector<Vec3> Resample(const std::vector<Vec3>& pool, int n, Rng& rng) {
  std::vector<Vec3> out;
  out.reserve(n);
  const int m = static_cast<int>(pool.size());
  if (m >= n) {
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    for (int i = 0; i < n; ++i) {
      int j = i + static_cast<int>(IndexDraw(rng, m - i));
      std::swap(idx[i], idx[j]);
      out.push_back(pool[idx[i]]);
    }
    return out;
  }
  out = pool;
  while (static_cast<int>(out.size()) < n) {
    out.push_back(pool[IndexDraw(rng, m)]);
  }
  return out;
}

Vec3 RingNormal(const GarmentState& g, const ArmPose& arm, int i) {
  if (g.threaded[i]) return TangentAtArc(arm, g.ring_s[i]);
  const int n = g.RingCount();
  Vec3 d = g.centers[std::min(i + 1, n - 1)] - g.centers[std::max(i - 1, 0)];
  if (d.norm() < 1e-12) return arm.ForearmDirection();
  return d;
}

}  // namespace

int Observation::EndEffectorIndex() const {
  int found = -1;
  for (int i = 0; i < size(); ++i) {
    if (classes[i] == PointClass::kEndEffector) {
      if (found >= 0) throw ContractError("more than one end-effector point");
      found = i;
    }
  }
  if (found < 0) throw ContractError("observation has no end-effector point");
  return found;
}

void Observation::Validate() const {
  if (positions.size() != classes.size()) {
    throw ContractError("positions/classes length mismatch");
  }
  EndEffectorIndex();
}

std::vector<ArmCandidate> SampleArmCandidates(const ArmPose& arm, int count,
                                              Rng& rng) {
  const BodySize& b = arm.body;
  const double area_f = b.forearm_radius * b.forearm_length;
  const double area_u = b.upperarm_radius * b.upperarm_length;
  Vec3 ef1, ef2, eu1, eu2;
  PlaneBasis(arm.ForearmDirection(), ef1, ef2);
  PlaneBasis(arm.UpperarmDirection(), eu1, eu2);
  std::vector<ArmCandidate> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const bool fore = UniformDraw(rng) * (area_f + area_u) < area_f;
    const double t = UniformDraw(rng);
    const double theta = kTwoPi * UniformDraw(rng);
    ArmCandidate c;
    if (fore) {
      c.normal = std::cos(theta) * ef1 + std::sin(theta) * ef2;
      c.s = t * b.forearm_length;
      c.position = arm.hand + c.s * arm.ForearmDirection() +
                   b.forearm_radius * c.normal;
    } else {
      c.normal = std::cos(theta) * eu1 + std::sin(theta) * eu2;
      c.s = b.forearm_length + t * b.upperarm_length;
      c.position = arm.elbow +
                   (c.s - b.forearm_length) * arm.UpperarmDirection() +
                   b.upperarm_radius * c.normal;
    }
    out.push_back(c);
  }
  return out;
}

Observation RenderPointCloud(const ArmPose& arm, const GarmentSpec& garment_spec,
                             const GarmentState& garment, const Vec3& gripper,
                             const PointBudget& budget, Rng& rng,
                             const Vec3& camera) {
  if (budget.n_garment < 1 || budget.n_arm < 1) {
    throw RangeError("point budgets must be >= 1");
  }
  const int n = garment.RingCount();
  Observation obs;
  obs.positions.reserve(budget.n_garment + budget.n_arm + 1);

  // Garment: ring chosen uniformly, angle uniform on its circle.
  std::vector<Vec3> e1(n), e2(n);
  for (int i = 0; i < n; ++i) PlaneBasis(RingNormal(garment, arm, i), e1[i], e2[i]);
  for (int k = 0; k < budget.n_garment; ++k) {
    const int i = static_cast<int>(IndexDraw(rng, n));
    const double theta = kTwoPi * UniformDraw(rng);
    obs.positions.push_back(garment.centers[i] +
                            garment_spec.ring_radius[i] *
                                (std::cos(theta) * e1[i] + std::sin(theta) * e2[i]));
    obs.classes.push_back(PointClass::kGarment);
  }

  // Arm: 4x oversampled candidates, culled, then resampled to budget.
  std::vector<ArmCandidate> cands = SampleArmCandidates(arm, 4 * budget.n_arm, rng);
  std::vector<Vec3> visible;
  for (const ArmCandidate& c : cands) {
    if (!CoveredBySleeve(c, garment.deepest_threaded_s) && FacesCamera(c, camera)) {
      visible.push_back(c.position);
    }
  }
  std::vector<Vec3> arm_pts;
  if (visible.empty()) {
    // Degenerate fill: repeat the candidate closest to the shoulder.
    auto it = std::min_element(cands.begin(), cands.end(),
                               [&](const ArmCandidate& a, const ArmCandidate& b) {
                                 return (a.position - arm.shoulder).squaredNorm() <
                                        (b.position - arm.shoulder).squaredNorm();
                               });
    arm_pts.assign(budget.n_arm, it->position);
  } else {
    arm_pts = Resample(visible, budget.n_arm, rng);
  }
  for (const Vec3& p : arm_pts) {
    obs.positions.push_back(p);
    obs.classes.push_back(PointClass::kArm);
  }

  obs.positions.push_back(gripper);
  obs.classes.push_back(PointClass::kEndEffector);
  return obs;
}

Vec3 EmaForce(const std::optional<Vec3>& prev, const Vec3& raw, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw RangeError("EMA alpha must lie in (0, 1]");
  }
  if (!prev) return raw;
  return alpha * raw + (1.0 - alpha) * *prev;
}

}  // namespace dresslab
