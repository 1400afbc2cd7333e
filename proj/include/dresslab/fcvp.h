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


// Force-constrained vision policy: candidate actions from a vision policy are
// screened by a learned predictor of the force accumulated over the next few
// steps.

#ifndef DRESSLAB_FCVP_H_
#define DRESSLAB_FCVP_H_

#include <array>
#include <cstdint>
#include <vector>

#include "dresslab/policy.h"

namespace dresslab {

inline constexpr int kForceWindow = 5;

struct ForceWindowSample {
  nn::Vec latent;  // vision encoder feature at the window start
  Vec6 action_n = Vec6::Zero();
  std::array<Vec3, kForceWindow> history;  // raw forces, oldest first
  double target = 0.0;  // sum of |raw force| over the next kForceWindow steps
};

// Windows start at every step t with kForceWindow - 1 earlier observations
// and kForceWindow post-action forces available: the history is the raw
// force of observations t-4..t and the target sums the post-action force
// magnitudes of steps t..t+4. Other steps are skipped.
std::vector<ForceWindowSample> BuildForceWindows(
    const std::vector<Trajectory>& ts, const GaussianPolicy& vision,
    const nn::ParameterStore& vision_store);

struct ForceDynamicsConfig {
  std::vector<int> hidden = {64, 64};
  double target_scale = 10.0;  // N per output unit
  int steps = 2000;
  int batch = 64;
  double lr = 1e-3;
  uint64_t seed = 0;
};

class ForceDynamics {
 public:
  ForceDynamics(int latent_width, ForceDynamicsConfig cfg = {});

  void Init(Rng& rng);
  double Predict(const nn::Vec& latent, const Vec6& action_n,
                 const std::array<Vec3, kForceWindow>& history) const;
  // Adam on squared error; returns the mean batch loss per step.
  std::vector<double> Train(const std::vector<ForceWindowSample>& data);

  const nn::ParameterStore& store() const { return store_; }
  nn::ParameterStore& store() { return store_; }
  const ForceDynamicsConfig& config() const { return cfg_; }

 private:
  nn::Vec Input(const nn::Vec& latent, const Vec6& action_n,
                const std::array<Vec3, kForceWindow>& history) const;

  int latent_width_;
  ForceDynamicsConfig cfg_;
  nn::MlpSpec spec_;
  nn::ParameterStore store_;
};

// Index of the chosen candidate: the most likely candidate whose prediction
// does not exceed `threshold`, or the lowest prediction when none qualifies.
// Ties go to the lower index.
int FcvpSelect(const std::vector<double>& log_probs,
               const std::vector<double>& predicted, double threshold);

inline constexpr double kFcvpThreshold = 40.0;  // N over kForceWindow steps
inline constexpr int kFcvpCandidates = 32;

// Candidate 0 is the policy mean; the rest are samples from it.
class FcvpPolicy : public Policy {
 public:
  FcvpPolicy(const GaussianPolicy& vision, const nn::ParameterStore& store,
             const ForceDynamics& dynamics, int candidates = kFcvpCandidates,
             double threshold = kFcvpThreshold);

  Vec6 Act(const Observation& obs, const PolicyContext& ctx, Rng& rng) override;

 private:
  const GaussianPolicy& vision_;
  const nn::ParameterStore& store_;
  const ForceDynamics& dynamics_;
  int candidates_;
  double threshold_;
};

}  // namespace dresslab

#endif  // DRESSLAB_FCVP_H_
