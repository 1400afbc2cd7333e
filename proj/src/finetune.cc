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


#include "dresslab/finetune.h"

#include <string>

namespace dresslab {

std::string_view FinetuneModeName(FinetuneMode mode) {
  switch (mode) {
    case FinetuneMode::kFmvp:
      return "fmvp";
    case FinetuneMode::kVisionOnly:
      return "vision-ft";
    case FinetuneMode::kForceOnly:
      return "force-ft";
    case FinetuneMode::kBc:
      return "bc-ft";
    case FinetuneMode::kScratchFilm:
      return "scratch-film";
    case FinetuneMode::kScratchConcat:
      return "scratch-concat";
  }
  throw ContractError("unknown fine-tune mode");
}

FinetuneMode ParseFinetuneMode(std::string_view name) {
  for (FinetuneMode m : kAllFinetuneModes) {
    if (FinetuneModeName(m) == name) return m;
  }
  throw RangeError("unknown fine-tune mode: " + std::string(name));
}

nn::ForceMode PolicyForceMode(FinetuneMode mode) {
  switch (mode) {
    case FinetuneMode::kVisionOnly:
      return nn::ForceMode::kNone;
    case FinetuneMode::kScratchConcat:
      return nn::ForceMode::kConcatMagnitude;
    default:
      return nn::ForceMode::kFilm;
  }
}

bool UsesPretrained(FinetuneMode mode) {
  return mode != FinetuneMode::kScratchFilm && mode != FinetuneMode::kScratchConcat;
}

bool UsesIql(FinetuneMode mode) { return mode != FinetuneMode::kBc; }

GaussianPolicy FinetunePolicy(FinetuneMode mode, ActionClip clip) {
  return GaussianPolicy(PolicyNetConfig(PolicyForceMode(mode)), clip);
}

nn::ParameterStore InitFinetuneParameters(FinetuneMode mode,
                                          const nn::ParameterStore* pretrained,
                                          Rng& rng, ActionClip clip) {
  nn::ParameterStore store;
  FinetunePolicy(mode, clip).Init(store, rng);
  if (!UsesPretrained(mode)) return store;
  if (pretrained == nullptr) {
    throw ContractError(std::string(FinetuneModeName(mode)) +
                        " needs a pretrained vision checkpoint");
  }
  nn::ParameterStore vision;
  FinetunePolicy(FinetuneMode::kVisionOnly, clip).Init(vision, rng);
  for (const auto& [name, entry] : vision.entries()) {
    if (!pretrained->Has(name) || pretrained->Get(name).shape != entry.shape) {
      throw ContractError("pretrained checkpoint does not match the vision policy at " +
                          name);
    }
  }
  if (pretrained->entries().size() != vision.entries().size()) {
    throw ContractError("pretrained checkpoint is not a vision-only policy");
  }
  store.CopyValuesFrom(*pretrained);
  return store;
}

FinetuneResult Finetune(const std::vector<Trajectory>& labeled,
                        const nn::ParameterStore* pretrained,
                        const FinetuneConfig& cfg, ActionClip clip) {
  cfg.iql.Validate();
  if (cfg.steps < 0) throw RangeError("negative fine-tune step count");
  const std::vector<Transition> data = CollectTransitions(labeled, clip);
  if (data.empty()) throw ContractError("fine-tuning needs a nonempty dataset");
  Rng rng(SplitSeed(cfg.seed, 0xF7));
  FinetuneResult r;
  GaussianPolicy pi = FinetunePolicy(cfg.mode, clip);
  nn::ParameterStore init = InitFinetuneParameters(cfg.mode, pretrained, rng, clip);

  if (!UsesIql(cfg.mode)) {
    std::vector<BcSample> samples;
    for (const Transition& t : data) samples.push_back({t.obs, t.action_n});
    BcConfig bc{cfg.steps, cfg.iql.lr, cfg.iql.batch, SplitSeed(cfg.seed, 0xB0)};
    BcResult res = BcDistill(pi, samples, bc, &init);
    r.policy = std::move(res.store);
    for (double l : res.loss) r.log.push_back({0.0, 0.0, l, 0.0});
    return r;
  }

  IqlNets nets(pi, cfg.mode != FinetuneMode::kVisionOnly);
  nets.pi_store = std::move(init);
  if (cfg.mode == FinetuneMode::kForceOnly) {
    for (const std::string& p : pi.net().EncoderPrefixes()) {
      nets.pi_store.SetFrozen(p, true);
    }
  }
  nets.InitCritics(rng, UsesPretrained(cfg.mode) ? &nets.pi_store : nullptr);

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  std::vector<const Transition*> batch(cfg.iql.batch);
  for (int step = 0; step < cfg.steps; ++step) {
    for (const Transition*& b : batch) {
      if (cursor == order.size()) {
        Shuffle(order, rng);
        cursor = 0;
      }
      b = &data[order[cursor++]];
    }
    r.log.push_back(IqlUpdate(nets, batch, cfg.iql));
  }
  r.policy = std::move(nets.pi_store);
  for (auto& [name, entry] : r.policy.entries()) entry.frozen = false;
  return r;
}

}  // namespace dresslab
