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

#ifndef DRESSLAB_REWARD_H_
#define DRESSLAB_REWARD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dresslab/environment.h"
#include "dresslab/neural/pointnet.h"

namespace dresslab {

enum class PreferenceSource : uint8_t { kTimeBased = 0, kOracle = 1 };

// A (trajectory, step) reference: the step's observation and action.
struct StepRef {
  int traj = 0;
  int step = 0;
  bool operator==(const StepRef&) const = default;
};

// label 0: sample_0 preferred, 1: sample_1 preferred, -1: incomparable.
struct PreferencePair {
  StepRef sample_0;
  StepRef sample_1;
  int label = -1;
  PreferenceSource source = PreferenceSource::kTimeBased;
};

// Later steps of the same trajectory are preferred.
int TimePreference(int i, int j);

struct OracleOptions {
  double margin = 0.02;     // m
  double flip_prob = 0.1;
};

// Prefers the larger dressed depth; -1 inside the margin. The label is
// flipped with probability flip_prob (no draw is made for -1 outcomes).
int OraclePreference(double depth_i, double depth_j, double margin,
                     double flip_prob, Rng& rng);

// exp(r0) / (exp(r0) + exp(r1)), shifted by max(r0, r1).
double BtProbability(double r0, double r1);

// Mean Bradley-Terry negative log-likelihood; optional gradients with
// respect to the scores. Throws ContractError on a -1 label or mismatched
// lengths.
double BtLoss(const std::vector<double>& r0, const std::vector<double>& r1,
              const std::vector<int>& labels, std::vector<double>* dr0 = nullptr,
              std::vector<double>* dr1 = nullptr);

inline constexpr double kDefaultForceNormalizer = 8.0;  // N
inline constexpr double kDefaultForceWeight = 0.1;

// -min(1, |f| / normalizer)^2.
double ForcePenalty(const Vec3& f, double normalizer = kDefaultForceNormalizer);
// clamp(r_pref + w * r_force, -1, 1).
double CompositeReward(double r_pref, double r_force,
                       double w = kDefaultForceWeight);
// 95th percentile (nearest rank) of |raw force| over all privileged steps.
double ForceNormalizer95(const std::vector<Trajectory>& ts);

// Post-step dressed depth of a referenced sample (the oracle's ground truth).
double DepthAt(const std::vector<Trajectory>& ts, const StepRef& r);

// `n_oracle` pairs drawn uniformly across the dataset and `n_time` pairs
// drawn within single trajectories. Incomparable pairs are kept.
std::vector<PreferencePair> GeneratePreferences(const std::vector<Trajectory>& ts,
                                                int n_oracle, int n_time,
                                                const OracleOptions& opt,
                                                uint64_t seed);

// Preference file: magic "DRP1", u32 version, u32 count, then per pair
// u32 traj/step for both samples, i8 label, u8 source.
inline constexpr uint32_t kPreferenceVersion = 1;
std::vector<uint8_t> SerializePreferences(const std::vector<PreferencePair>& ps);
std::vector<PreferencePair> DeserializePreferences(const std::vector<uint8_t>& bytes);
void SavePreferences(const std::vector<PreferencePair>& ps, const std::string& path);
std::vector<PreferencePair> LoadPreferences(const std::string& path);

// Classification PointNet scoring (observation, normalized action).
nn::PointNetConfig RewardNetConfig(const std::string& prefix = "reward");

class RewardModel {
 public:
  explicit RewardModel(nn::PointNetConfig cfg = RewardNetConfig(),
                       ActionClip clip = {});

  void Init(Rng& rng);
  double Raw(const Observation& obs, const Vec6& action) const;
  // Min-max normalized to [-1, 1] (clamped). Throws ContractError when the
  // normalization is not fitted.
  double Normalized(const Observation& obs, const Vec6& action) const;

  void FitNormalization(const std::vector<Trajectory>& ts);
  void SetNormalization(double lo, double hi);
  bool fitted() const { return lo_ < hi_; }
  double norm_min() const { return lo_; }
  double norm_max() const { return hi_; }

  const nn::PointNet& net() const { return net_; }
  nn::ParameterStore& store() { return store_; }
  const nn::ParameterStore& store() const { return store_; }
  const ActionClip& clip() const { return clip_; }

  // Checkpoint: the parameter container with the normalization pair stored
  // as an extra entry.
  void Save(const std::string& path) const;
  static RewardModel Load(const std::string& path, nn::PointNetConfig cfg = RewardNetConfig(),
                          ActionClip clip = {});

 private:
  nn::PointNet net_;
  nn::ParameterStore store_;
  ActionClip clip_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct RewardTrainConfig {
  int max_epochs = 1000;
  double lr = 1e-4;
  int batch = 64;
  double heldout_fraction = 0.1;  // of decidable pairs
  int patience = 20;              // epochs without held-out improvement
  double min_delta = 1e-4;
  // Upper bound on optimizer steps per epoch (0: full pass).
  int max_steps_per_epoch = 0;
  uint64_t seed = 0;
};

struct RewardTrainResult {
  std::vector<double> train_loss;    // per epoch
  std::vector<double> heldout_loss;  // per epoch
  double heldout_accuracy = 0.0;     // on held-out pairs vs their labels
  int epochs = 0;
};

// Adam on the Bradley-Terry loss over decidable pairs; fits the
// normalization over every sample of `ts`. Throws SamplingFailure when no
// pair is decidable.
RewardTrainResult TrainRewardModel(RewardModel& model,
                                   const std::vector<Trajectory>& ts,
                                   const std::vector<PreferencePair>& pairs,
                                   const RewardTrainConfig& cfg);

// Fraction of `n_pairs` random sample pairs (depth gap >= margin) that the
// model orders like the ground-truth depth.
double DepthOrderAccuracy(const RewardModel& model,
                          const std::vector<Trajectory>& ts, int n_pairs,
                          double margin, uint64_t seed);

// Writes r_total = clamp(r_pref + w * r_force, -1, 1) into every step.
void LabelDataset(std::vector<Trajectory>& ts, const RewardModel& model,
                  double w_force = kDefaultForceWeight,
                  double force_normalizer = kDefaultForceNormalizer);

}  // namespace dresslab

#endif  // DRESSLAB_REWARD_H_
