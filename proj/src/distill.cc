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

#include "dresslab/distill.h"

#include <algorithm>
#include <numeric>

namespace dresslab {
namespace {

double Combine(const Vec3& a, const Vec3& b, TurnTestVariant variant) {
  if (variant == TurnTestVariant::kDot) return a.dot(b);
  return a.x() * b.z() - a.z() * b.x();
}

}  // namespace

TurnTestResult InnerSideTest(const TurnTestInput& t, TurnTestVariant variant) {
  if ((t.hand - t.elbow).norm() == 0.0 || (t.elbow - t.shoulder).norm() == 0.0) {
    throw ContractError("degenerate arm in turn test");
  }
  const Vec3 v1 = t.hand - t.gripper;
  const Vec3 d1 = t.hand - t.elbow;
  const Vec3 v2 = t.elbow - t.gripper;
  const Vec3 d2 = t.elbow - t.shoulder;
  TurnTestResult r;
  r.c1 = Combine(v1, d1, variant);
  r.c2 = Combine(v2, d2, variant);
  r.inner = r.c1 < 0.0 && r.c2 < 0.0;
  return r;
}

bool DetectEarlyTurn(const Trajectory& t, TurnTestVariant variant) {
  for (const PrivilegedStep& p : t.privileged) {
    const ArmPose arm = p.Arm(t.meta.body);
    if (ComputeArcCoordinate(p.gripper, arm).region != ArmRegion::kElbowRegion) {
      continue;
    }
    if (InnerSideTest({p.gripper, p.hand, p.elbow, p.shoulder}, variant).inner) {
      return true;
    }
  }
  return false;
}

std::vector<int> FilterTrajectories(const std::vector<Trajectory>& ts,
                                    TurnTestVariant variant) {
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    if (ComputeDressedRatios(ts[i]).upper >= kMinUpperRatio &&
        !DetectEarlyTurn(ts[i], variant)) {
      keep.push_back(i);
    }
  }
  return keep;
}

std::vector<BcSample> CollectBcSamples(const std::vector<Trajectory>& ts,
                                       const ActionClip& clip) {
  std::vector<BcSample> out;
  for (const Trajectory& t : ts) {
    for (const TrajectoryStep& s : t.steps) {
      out.push_back({&s.obs, NormalizeAction(s.action, clip)});
    }
  }
  return out;
}

BcResult BcDistill(const GaussianPolicy& pi, const std::vector<BcSample>& data,
                   const BcConfig& cfg, const nn::ParameterStore* init) {
  if (data.empty()) throw ContractError("behavior cloning needs a nonempty dataset");
  if (cfg.steps < 0 || cfg.batch < 1) throw RangeError("bad BC step or batch count");
  BcResult r;
  Rng rng(SplitSeed(cfg.seed, 0xBC));
  if (init != nullptr) {
    r.store = *init;
  } else {
    pi.Init(r.store, rng);
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  r.loss.reserve(cfg.steps);
  for (int step = 0; step < cfg.steps; ++step) {
    r.store.ZeroGrad();
    double loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      if (cursor == order.size()) {
        Shuffle(order, rng);
        cursor = 0;
      }
      const BcSample& s = data[order[cursor++]];
      loss += pi.NllBackward(r.store, *s.obs, s.action_n, 1.0 / cfg.batch);
    }
    r.store.AdamStep({.lr = cfg.lr});
    r.loss.push_back(loss / cfg.batch);
  }
  return r;
}

}  // namespace dresslab
