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

#ifndef DRESSLAB_TRAJECTORY_H_
#define DRESSLAB_TRAJECTORY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dresslab/arm_kinematics.h"
#include "dresslab/sensing.h"

namespace dresslab {

enum class Domain : uint8_t { kSource = 0, kTarget = 1 };

std::string_view DomainName(Domain d);

enum class Termination : uint8_t {
  kNone = 0,
  kMaxSteps = 1,
  kForceLimit = 2,
  kShoulderReached = 3,
  kNoProgress = 4,
};

inline constexpr Termination kAllTerminations[] = {
    Termination::kMaxSteps, Termination::kForceLimit,
    Termination::kShoulderReached, Termination::kNoProgress};

std::string_view TerminationName(Termination t);

struct TrajectoryStep {
  Observation obs;  // includes the force sample the policy saw
  Vec6 action = Vec6::Zero();  // applied (clipped) action, m and rad
  double reward = 0.0;
  bool done = false;
};

// Ground truth after the step's action was applied.
struct PrivilegedStep {
  Vec3 shoulder = Vec3::Zero();
  Vec3 elbow = Vec3::Zero();
  Vec3 hand = Vec3::Zero();
  Vec3 gripper = Vec3::Zero();
  Vec3 gripper_rotation = Vec3::Zero();
  double deepest_threaded_s = 0.0;
  Vec3 raw_force = Vec3::Zero();

  ArmPose Arm(const BodySize& body) const { return {shoulder, elbow, hand, body}; }
};

struct TrajectoryMeta {
  uint64_t config_hash = 0;
  uint64_t seed = 0;
  Termination reason = Termination::kNone;
  Domain domain = Domain::kSource;
  BodySize body;
  std::string garment;
  std::string motion;  // motion label or "static"
  double initial_deepest_s = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  std::vector<PrivilegedStep> privileged;
  TrajectoryMeta meta;

  int size() const { return static_cast<int>(steps.size()); }
  bool empty() const { return steps.empty(); }
  double FinalDeepest() const;
  // Exactly one terminal step (the last), finite rewards, matching lengths.
  // Throws ContractError otherwise.
  void Validate() const;
};

// Rounds a value to the stored (32-bit) precision.
inline double Quantize(double v) { return static_cast<double>(static_cast<float>(v)); }
void QuantizeObservation(Observation& obs);
Vec6 QuantizeAction(const Vec6& a);

// Binary container: magic "DRS1", u32 version, u32 step count, then per
// step u32 point count, f32 xyz per point, u8 class per point, f32 raw and
// smoothed force, f32 action(6), f32 reward, u8 done; then the privileged
// block (f64) and the metadata. Little-endian.
inline constexpr uint32_t kTrajectoryVersion = 1;

std::vector<uint8_t> SerializeTrajectory(const Trajectory& t);
// Throws CorruptFileError (with byte offset) or UnsupportedVersionError.
Trajectory DeserializeTrajectory(const std::vector<uint8_t>& bytes);
void SaveTrajectory(const Trajectory& t, const std::string& path);
Trajectory LoadTrajectory(const std::string& path);

// Writes/reads "<dir>/traj_<00000>.drs" files in index order.
void SaveTrajectories(const std::vector<Trajectory>& ts, const std::string& dir);
std::vector<Trajectory> LoadTrajectories(const std::string& dir);

}  // namespace dresslab

#endif  // DRESSLAB_TRAJECTORY_H_
