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

#ifndef DRESSLAB_DISTILL_H_
#define DRESSLAB_DISTILL_H_

#include <cstdint>
#include <vector>

#include "dresslab/policy.h"

namespace dresslab {

enum class TurnTestVariant { kCrossXZ, kDot };

struct TurnTestInput {
  Vec3 gripper;
  Vec3 hand;
  Vec3 elbow;
  Vec3 shoulder;
};

struct TurnTestResult {
  double c1 = 0.0;
  double c2 = 0.0;
  bool inner = false;
};

// v1 = hand - gripper, d1 = hand - elbow, v2 = elbow - gripper,
// d2 = elbow - shoulder. CrossXZ uses the planar cross product
// a.x * b.z - a.z * b.x, Dot the full dot product; inner iff both < 0.
TurnTestResult InnerSideTest(const TurnTestInput& t,
                             TurnTestVariant variant = TurnTestVariant::kCrossXZ);

// True iff at some step the gripper sits in the elbow region and on the
// inner side of the arm.
bool DetectEarlyTurn(const Trajectory& t,
                     TurnTestVariant variant = TurnTestVariant::kCrossXZ);

inline constexpr double kMinUpperRatio = 0.7;

// Indices of trajectories with upper-arm ratio >= 0.7 and no early turn.
std::vector<int> FilterTrajectories(
    const std::vector<Trajectory>& ts,
    TurnTestVariant variant = TurnTestVariant::kCrossXZ);

struct BcConfig {
  int steps = 40000;
  double lr = 1e-4;
  int batch = 128;
  uint64_t seed = 0;
};

struct BcSample {
  const Observation* obs = nullptr;
  Vec6 action_n = Vec6::Zero();
};

// Every (observation, normalized action) pair of the given trajectories.
std::vector<BcSample> CollectBcSamples(const std::vector<Trajectory>& ts,
                                       const ActionClip& clip);

struct BcResult {
  nn::ParameterStore store;
  std::vector<double> loss;  // mean batch NLL per step
};

// Minimizes the action NLL with Adam. Throws ContractError on an empty
// dataset. `init` (optional) seeds the parameters instead of a fresh init.
BcResult BcDistill(const GaussianPolicy& pi, const std::vector<BcSample>& data,
                   const BcConfig& cfg, const nn::ParameterStore* init = nullptr);

}  // namespace dresslab

#endif  // DRESSLAB_DISTILL_H_
