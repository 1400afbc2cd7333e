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


// End-to-end stages: SOURCE collection, distillation, TARGET collection,
// reward learning, labeling, fine-tuning and evaluation. Every stage draws
// its randomness from StageSeed(master, stage).

#ifndef DRESSLAB_PIPELINE_H_
#define DRESSLAB_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dresslab/distill.h"
#include "dresslab/expert.h"
#include "dresslab/fcvp.h"
#include "dresslab/finetune.h"
#include "dresslab/harness.h"
#include "dresslab/reward.h"

namespace dresslab {

enum class Stage : uint64_t {
  kSource = 1,
  kDistill,
  kTarget,
  kPreferences,
  kReward,
  kFinetune,
  kForceDynamics,
  kEval,
};

uint64_t StageSeed(uint64_t master, Stage stage);

struct PipelineConfig {
  uint64_t seed = 0;
  int source_episodes = 200;
  ExpertConfig expert{.early_turn_prob = 0.2};
  TurnTestVariant turn_test = TurnTestVariant::kCrossXZ;
  BcConfig bc{.steps = 1000, .lr = 1e-3, .batch = 32};
  int target_episodes = 204;
  int oracle_pairs = 4000;
  int time_pairs = 4000;
  OracleOptions oracle;
  RewardTrainConfig reward{.max_epochs = 3, .lr = 1e-3};
  double force_weight = kDefaultForceWeight;
  IqlHyper iql{.batch = 32};
  int finetune_steps = 300;
  ForceDynamicsConfig force_dynamics;
  EvalGrid grid = DeskGrid();
};

// Methods accepted by Evaluate, in report order: the zero-shot vision
// policy, the fine-tuned variants and the force-filtered vision policy.
const std::vector<std::string>& EvalMethods();

std::vector<Trajectory> CollectSource(const PipelineConfig& cfg);

struct DistillResult {
  std::vector<int> kept;
  nn::ParameterStore policy;
  std::vector<double> loss;
};
DistillResult DistillVision(const std::vector<Trajectory>& source,
                            const PipelineConfig& cfg);

// Rolls out the stochastic vision policy over TargetConfigs.
std::vector<Trajectory> CollectTarget(const nn::ParameterStore& vision,
                                      const PipelineConfig& cfg);

struct RewardStageResult {
  std::vector<PreferencePair> pairs;
  RewardModel model;
  RewardTrainResult train;
};
RewardStageResult TrainReward(const std::vector<Trajectory>& target,
                              const PipelineConfig& cfg);

// Labels with the reward model and the dataset's 95th-percentile force
// normalizer; returns the normalizer.
double LabelTarget(std::vector<Trajectory>& target, const RewardModel& model,
                   const PipelineConfig& cfg);

FinetuneResult RunFinetune(const std::vector<Trajectory>& labeled,
                            const nn::ParameterStore& vision, FinetuneMode mode,
                            const PipelineConfig& cfg);

ForceDynamics TrainForceDynamics(const std::vector<Trajectory>& target,
                                 const nn::ParameterStore& vision,
                                 const PipelineConfig& cfg);

// A policy object for one evaluation method plus whatever it references.
class MethodPolicy {
 public:
  // `params` holds the method's policy checkpoint (the vision checkpoint for
  // "vision" and "fcvp"); `dynamics` is required for "fcvp" only.
  MethodPolicy(const std::string& method, nn::ParameterStore params,
               std::shared_ptr<const ForceDynamics> dynamics = nullptr);

  Policy& policy() { return *policy_; }
  const std::string& method() const { return method_; }

 private:
  std::string method_;
  nn::ParameterStore params_;
  std::unique_ptr<GaussianPolicy> net_;
  std::shared_ptr<const ForceDynamics> dynamics_;
  std::unique_ptr<Policy> policy_;
};

EvalReport Evaluate(MethodPolicy& m, const PipelineConfig& cfg);

}  // namespace dresslab

#endif  // DRESSLAB_PIPELINE_H_
