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


#ifndef DRESSLAB_FINETUNE_H_
#define DRESSLAB_FINETUNE_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "dresslab/distill.h"
#include "dresslab/iql.h"

namespace dresslab {

enum class FinetuneMode {
  kFmvp,           // IQL, FiLM, pretrained encoder
  kVisionOnly,     // IQL, no force input
  kForceOnly,      // as kFmvp with the encoder frozen
  kBc,             // FiLM architecture, plain NLL
  kScratchFilm,    // as kFmvp from random init
  kScratchConcat,  // IQL, force magnitude channel, random init
};

inline constexpr FinetuneMode kAllFinetuneModes[] = {
    FinetuneMode::kFmvp,        FinetuneMode::kVisionOnly,
    FinetuneMode::kForceOnly,   FinetuneMode::kBc,
    FinetuneMode::kScratchFilm, FinetuneMode::kScratchConcat};

// CLI names: fmvp, vision-ft, force-ft, bc-ft, scratch-film, scratch-concat.
std::string_view FinetuneModeName(FinetuneMode mode);
FinetuneMode ParseFinetuneMode(std::string_view name);

nn::ForceMode PolicyForceMode(FinetuneMode mode);
bool UsesPretrained(FinetuneMode mode);
bool UsesIql(FinetuneMode mode);

struct FinetuneConfig {
  FinetuneMode mode = FinetuneMode::kFmvp;
  IqlHyper iql;
  int steps = 2000;
  uint64_t seed = 0;
};

struct FinetuneResult {
  nn::ParameterStore policy;
  std::vector<IqlLosses> log;
};

// The policy architecture for `mode` under prefix "pi".
GaussianPolicy FinetunePolicy(FinetuneMode mode, ActionClip clip = {});

// Initial policy parameters for `mode`. Pretrained modes copy every entry of
// `pretrained`, which must be a vision-only checkpoint of the same encoder;
// FiLM blocks keep their identity initialization. Throws ContractError on a
// missing or mismatched checkpoint.
nn::ParameterStore InitFinetuneParameters(FinetuneMode mode,
                                          const nn::ParameterStore* pretrained,
                                          Rng& rng, ActionClip clip = {});

// Fine-tunes on labeled trajectories. IQL modes sample batches of
// transitions; kBc samples (observation, action) pairs.
FinetuneResult Finetune(const std::vector<Trajectory>& labeled,
                        const nn::ParameterStore* pretrained,
                        const FinetuneConfig& cfg, ActionClip clip = {});

}  // namespace dresslab

#endif  // DRESSLAB_FINETUNE_H_
