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

// Ring-chain sleeve surrogate.
//
// Ring 0 is the cuff, ring n-1 the grasped shoulder opening which is rigidly
// attached to the gripper. The gripper leads along the arm and the rest of
// the chain trails behind it; rings thread over the hand tip starting with
// the one next to the grasp ring, so the threaded set is always a contiguous
// run ending at ring n-2 (a ring deeper on the arm is threaded whenever a
// shallower one is). The grasp ring itself is held by the gripper and never
// settles on the arm, which keeps a spring link between the deepest threaded
// ring and the gripper for the tension signal.

#ifndef DRESSLAB_GARMENT_H_
#define DRESSLAB_GARMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dresslab/arm_kinematics.h"
#include "dresslab/common.h"

namespace dresslab {

struct GarmentSpec {
  std::string name = "standard";
  int ring_count = 12;
  std::vector<double> ring_radius;  // cuff -> grasp, m
  double rest_spacing = 0.05;
  double spring_k = 50.0;           // N/m
  double snag_clearance = 0.01;     // m
  int n_relax = 8;
  double noise_sigma = 0.2;         // N per axis
  double elbow_pass_threshold = 0.7;  // rad

  void Validate() const;
  double RestLength() const { return (ring_count - 1) * rest_spacing; }
};

// Linear radius taper from cuff to opening.
std::vector<double> TaperedRadii(int ring_count, double cuff_radius,
                                 double opening_radius);

// Named garment profiles. "standard" and "wide" are the fine-tuning
// garments; "narrow" and "short" are held out for evaluation.
GarmentSpec GarmentProfile(const std::string& name);
std::vector<std::string> GarmentProfileNames();

// Dynamics gap between the pre-training simulator and the transfer target:
// stiffer spring, noisier force, rings 15% narrower.
GarmentSpec ToTargetDomain(const GarmentSpec& source);

struct GraspPose {
  Vec3 position = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // axis-angle
};

struct GarmentState {
  std::vector<Vec3> centers;
  std::vector<uint8_t> threaded;
  std::vector<double> ring_s;  // arc coordinate of threaded rings, else 0
  double deepest_threaded_s = 0.0;
  GraspPose grasp;

  int RingCount() const { return static_cast<int>(centers.size()); }
  // Index of the deepest threaded ring or -1.
  int DeepestThreaded() const;
  bool AnyThreaded() const { return DeepestThreaded() >= 0; }
};

struct RigidDelta {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // axis-angle
};

struct GarmentStep {
  GarmentState state;
  Vec3 raw_force = Vec3::Zero();
  bool snagged = false;
};

// Lays the chain out from the grasp ring along the forearm axis, away from
// the shoulder. Throws ContractError when the grasp is more than 0.4 m from
// the hand.
GarmentState InitGarment(const GarmentSpec& spec, const ArmPose& arm,
                         const GraspPose& grasp);

// Sum over links of max(0, |c_i+1 - c_i| - rest)^2.
double SpacingError(const GarmentSpec& spec, const GarmentState& state);

// One relaxation iteration (cuff->grasp sweep then grasp->cuff sweep).
// Threaded rings slide forward along the arm axis only; `snagged` is set
// when the deepest threaded ring was held back. Iterations that would raise
// SpacingError are discarded and reported by returning false.
bool RelaxOnce(const GarmentSpec& spec, const ArmPose& arm, GarmentState& state,
               bool& snagged);

// Tension spring force on the gripper, noiseless.
Vec3 ChainForce(const GarmentSpec& spec, const GarmentState& state);

// Advances the garment one control step. `arm` is the arm pose for this
// step; threaded rings keep their arc coordinates when the arm moves.
// `noise_rng` may be null when spec.noise_sigma is zero.
GarmentStep StepGarment(const GarmentSpec& spec, const GarmentState& state,
                        const RigidDelta& gripper_delta, const ArmPose& arm,
                        Rng* noise_rng);

struct DressedLengths {
  double forearm = 0.0;
  double upperarm = 0.0;
};

DressedLengths ComputeDressedLengths(double deepest_threaded_s,
                                     const BodySize& body);
inline DressedLengths ComputeDressedLengths(const GarmentState& state,
                                            const ArmPose& arm) {
  return ComputeDressedLengths(state.deepest_threaded_s, arm.body);
}

}  // namespace dresslab

#endif  // DRESSLAB_GARMENT_H_
