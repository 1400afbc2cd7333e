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

#ifndef DRESSLAB_POLICY_H_
#define DRESSLAB_POLICY_H_

#include <string>

#include "dresslab/environment.h"
#include "dresslab/neural/pointnet.h"

namespace dresslab {

inline constexpr int kActionDim = 6;

// Actions are learned in units of the per-step clip, so every component of
// a feasible action lies in [-1, 1].
Vec6 NormalizeAction(const Vec6& a, const ActionClip& clip);
Vec6 DenormalizeAction(const Vec6& a_n, const ActionClip& clip);

// Desk-scale segmentation network for the policy: two downsampling set
// abstraction levels and small widths.
nn::PointNetConfig PolicyNetConfig(nn::ForceMode force_mode,
                                   const std::string& prefix = "pi");

// Diagonal Gaussian over normalized actions on top of a segmentation
// PointNet (output: 6 means then 6 log standard deviations). FiLM and the
// concatenated-magnitude channel read the smoothed force.
class GaussianPolicy {
 public:
  struct Output {
    Vec6 mean = Vec6::Zero();
    Vec6 log_std = Vec6::Zero();  // clamped to [kLogStdMin, kLogStdMax]
    Vec6 raw_log_std = Vec6::Zero();
  };

  explicit GaussianPolicy(nn::PointNetConfig cfg, ActionClip clip = {});

  void Init(nn::ParameterStore& store, Rng& rng) const { net_.Init(store, rng); }
  Output Forward(const nn::ParameterStore& store, const Observation& obs,
                 nn::PointNetCache* cache = nullptr) const;
  // Negative log-likelihood of a normalized action.
  double Nll(const nn::ParameterStore& store, const Observation& obs,
             const Vec6& action_n) const;
  // Returns the NLL and accumulates weight * d NLL / d params.
  double NllBackward(nn::ParameterStore& store, const Observation& obs,
                     const Vec6& action_n, double weight) const;
  double LogProb(const Output& out, const Vec6& action_n) const;

  const nn::PointNet& net() const { return net_; }
  const nn::PointNetConfig& config() const { return net_.config(); }
  const ActionClip& clip() const { return clip_; }

 private:
  nn::PointNet net_;
  ActionClip clip_;
};

// Episode adapter: mean action, or a sample when `stochastic`.
class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(const GaussianPolicy& pi, const nn::ParameterStore& store,
                bool stochastic = false)
      : pi_(pi), store_(store), stochastic_(stochastic) {}

  Vec6 Act(const Observation& obs, const PolicyContext& ctx, Rng& rng) override;

 private:
  const GaussianPolicy& pi_;
  const nn::ParameterStore& store_;
  bool stochastic_;
};

}  // namespace dresslab

#endif  // DRESSLAB_POLICY_H_
