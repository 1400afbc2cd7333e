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


#include "dresslab/pipeline.h"

namespace dresslab {

uint64_t StageSeed(uint64_t master, Stage stage) {
  return SplitSeed(master, 0x5EED0000ull + static_cast<uint64_t>(stage));
}

const std::vector<std::string>& EvalMethods() {
  static const std::vector<std::string> methods = {
      "vision",   "fmvp",         "vision-ft",      "force-ft",
      "bc-ft",    "scratch-film", "scratch-concat", "fcvp"};
  return methods;
}

std::vector<Trajectory> CollectSource(const PipelineConfig& cfg) {
  ScriptedExpert expert(cfg.expert);
  return Collect(expert, SourceConfigs(cfg.source_episodes, StageSeed(cfg.seed, Stage::kSource)));
}

DistillResult DistillVision(const std::vector<Trajectory>& source,
                            const PipelineConfig& cfg) {
  DistillResult r;
  r.kept = FilterTrajectories(source, cfg.turn_test);
  std::vector<Trajectory> kept;
  for (int i : r.kept) kept.push_back(source[i]);
  GaussianPolicy pi(PolicyNetConfig(nn::ForceMode::kNone));
  BcConfig bc = cfg.bc;
  bc.seed = StageSeed(cfg.seed, Stage::kDistill);
  BcResult res = BcDistill(pi, CollectBcSamples(kept, pi.clip()), bc);
  r.policy = std::move(res.store);
  r.loss = std::move(res.loss);
  return r;
}

std::vector<Trajectory> CollectTarget(const nn::ParameterStore& vision,
                                      const PipelineConfig& cfg) {
  GaussianPolicy pi(PolicyNetConfig(nn::ForceMode::kNone));
  NetworkPolicy policy(pi, vision, /*stochastic=*/true);
  return Collect(policy, TargetConfigs(cfg.target_episodes, StageSeed(cfg.seed, Stage::kTarget)));
}

RewardStageResult TrainReward(const std::vector<Trajectory>& target,
                              const PipelineConfig& cfg) {
  RewardStageResult r;
  r.pairs = GeneratePreferences(target, cfg.oracle_pairs, cfg.time_pairs, cfg.oracle,
                                StageSeed(cfg.seed, Stage::kPreferences));
  RewardTrainConfig rc = cfg.reward;
  rc.seed = StageSeed(cfg.seed, Stage::kReward);
  r.train = TrainRewardModel(r.model, target, r.pairs, rc);
  return r;
}

double LabelTarget(std::vector<Trajectory>& target, const RewardModel& model,
                   const PipelineConfig& cfg) {
  const double normalizer = ForceNormalizer95(target);
  LabelDataset(target, model, cfg.force_weight, normalizer);
  return normalizer;
}

FinetuneResult RunFinetune(const std::vector<Trajectory>& labeled,
                           const nn::ParameterStore& vision, FinetuneMode mode,
                           const PipelineConfig& cfg) {
  FinetuneConfig fc;
  fc.mode = mode;
  fc.iql = cfg.iql;
  fc.steps = cfg.finetune_steps;
  fc.seed = SplitSeed(StageSeed(cfg.seed, Stage::kFinetune), static_cast<uint64_t>(mode));
  return Finetune(labeled, &vision, fc);
}

ForceDynamics TrainForceDynamics(const std::vector<Trajectory>& target,
                                 const nn::ParameterStore& vision,
                                 const PipelineConfig& cfg) {
  GaussianPolicy pi(PolicyNetConfig(nn::ForceMode::kNone));
  ForceDynamicsConfig fd = cfg.force_dynamics;
  fd.seed = StageSeed(cfg.seed, Stage::kForceDynamics);
  ForceDynamics model(pi.config().fp_widths.back(), fd);
  model.Train(BuildForceWindows(target, pi, vision));
  return model;
}

MethodPolicy::MethodPolicy(const std::string& method, nn::ParameterStore params,
                           std::shared_ptr<const ForceDynamics> dynamics)
    : method_(method), params_(std::move(params)), dynamics_(std::move(dynamics)) {
  if (method == "vision" || method == "fcvp") {
    net_ = std::make_unique<GaussianPolicy>(PolicyNetConfig(nn::ForceMode::kNone));
  } else {
    net_ = std::make_unique<GaussianPolicy>(FinetunePolicy(ParseFinetuneMode(method)));
  }
  nn::ParameterStore probe;
  Rng rng(0);
  net_->Init(probe, rng);
  for (const auto& [name, entry] : probe.entries()) {
    if (!params_.Has(name) || params_.Get(name).shape != entry.shape) {
      throw ContractError("checkpoint does not match the " + method + " architecture at " +
                          name);
    }
  }
  if (params_.entries().size() != probe.entries().size()) {
    throw ContractError("checkpoint has entries the " + method + " architecture lacks");
  }
  if (method == "fcvp") {
    if (!dynamics_) throw ContractError("fcvp needs a force dynamics model");
    policy_ = std::make_unique<FcvpPolicy>(*net_, params_, *dynamics_);
  } else {
    policy_ = std::make_unique<NetworkPolicy>(*net_, params_, /*stochastic=*/false);
  }
}

EvalReport Evaluate(MethodPolicy& m, const PipelineConfig& cfg) {
  return EvaluateGrid(m.method(), m.policy(), cfg.grid, StageSeed(cfg.seed, Stage::kEval));
}

}  // namespace dresslab
