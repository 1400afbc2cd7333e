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

#ifndef DRESSLAB_SENSING_H_
#define DRESSLAB_SENSING_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "dresslab/arm_kinematics.h"
#include "dresslab/common.h"
#include "dresslab/garment.h"

namespace dresslab {

enum class PointClass : uint8_t { kGarment = 0, kArm = 1, kEndEffector = 2 };

struct ForceSample {
  Vec3 raw = Vec3::Zero();
  Vec3 smoothed = Vec3::Zero();
};

// Segmented point cloud: garment points, then visible arm points, then the
// single end-effector point.
struct Observation {
  std::vector<Vec3> positions;
  std::vector<PointClass> classes;
  ForceSample force;

  int size() const { return static_cast<int>(positions.size()); }
  // Index of the (unique) end-effector point; throws ContractError if the
  // cloud does not contain exactly one.
  int EndEffectorIndex() const;
  void Validate() const;
};

struct PointBudget {
  int n_garment = 300;
  int n_arm = 200;
};

inline const Vec3 kDefaultCamera(1.0, 0.6, 1.0);

struct ArmCandidate {
  Vec3 position;
  Vec3 normal;
  double s = 0.0;
};

// Uniform samples over the two cylinder surfaces (area weighted).
std::vector<ArmCandidate> SampleArmCandidates(const ArmPose& arm, int count,
                                              Rng& rng);

// Hidden under the sleeve.
inline bool CoveredBySleeve(const ArmCandidate& c, double deepest_threaded_s) {
  return c.s < deepest_threaded_s;
}
// Back-face test against a point camera.
inline bool FacesCamera(const ArmCandidate& c, const Vec3& camera) {
  return c.normal.dot(camera - c.position) > 0.0;
}

// Points only; the caller fills `force`. Garment points lie on the ring
// circles, arm candidates are culled by sleeve coverage and back-face tests,
// and both groups are resampled to their exact budget.
Observation RenderPointCloud(const ArmPose& arm, const GarmentSpec& garment_spec,
                             const GarmentState& garment, const Vec3& gripper,
                             const PointBudget& budget, Rng& rng,
                             const Vec3& camera = kDefaultCamera);

// Exponential moving average; returns `raw` when there is no history.
Vec3 EmaForce(const std::optional<Vec3>& prev, const Vec3& raw, double alpha);

}  // namespace dresslab

#endif  // DRESSLAB_SENSING_H_
