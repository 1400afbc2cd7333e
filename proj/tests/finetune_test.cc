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

#include <gtest/gtest.h>

#include "dresslab/expert.h"

namespace dresslab {
namespace {

Observation ResetObservation(uint64_t seed) {
  EnvConfig c;
  c.seed = seed;
  DressingEnv env(c);
  env.Reset();
  return env.observation();
}

nn::ParameterStore VisionCheckpoint(uint64_t seed) {
  nn::ParameterStore s;
  Rng rng(seed);
  FinetunePolicy(FinetuneMode::kVisionOnly).Init(s, rng);
  return s;
}

std::vector<Trajectory> Labeled() {
  ScriptedExpert expert;
  EnvConfig c;
  c.seed = 4;
  Trajectory t = RunEpisode(expert, c);
  for (int i = 0; i < t.size(); ++i) t.steps[i].reward = Quantize(0.05 * i);
  return {t};
}

TEST(FinetuneModeTest, NamesRoundTrip) {
  const char* names[] = {"fmvp", "vision-ft", "force-ft", "bc-ft", "scratch-film",
                         "scratch-concat"};
  int i = 0;
  for (FinetuneMode m : kAllFinetuneModes) {
    EXPECT_EQ(FinetuneModeName(m), names[i++]);
    EXPECT_EQ(ParseFinetuneMode(FinetuneModeName(m)), m);
  }
  EXPECT_THROW(ParseFinetuneMode("fcvp"), RangeError);
  EXPECT_THROW(ParseFinetuneMode(""), RangeError);
}

TEST(FinetuneModeTest, Properties) {
  EXPECT_EQ(PolicyForceMode(FinetuneMode::kVisionOnly), nn::ForceMode::kNone);
  EXPECT_EQ(PolicyForceMode(FinetuneMode::kScratchConcat), nn::ForceMode::kConcatMagnitude);
  EXPECT_EQ(PolicyForceMode(FinetuneMode::kBc), nn::ForceMode::kFilm);
  EXPECT_FALSE(UsesPretrained(FinetuneMode::kScratchFilm));
  EXPECT_TRUE(UsesPretrained(FinetuneMode::kForceOnly));
  EXPECT_FALSE(UsesIql(FinetuneMode::kBc));
  EXPECT_EQ(FinetunePolicy(FinetuneMode::kScratchConcat).config().InputChannels(), 4);
  EXPECT_EQ(FinetunePolicy(FinetuneMode::kFmvp).config().InputChannels(), 3);
}

TEST(InitFinetuneTest, FilmStartsAsVisionPolicy) {
  const nn::ParameterStore vision_store = VisionCheckpoint(1);
  Rng rng(2);
  const nn::ParameterStore fmvp_store =
      InitFinetuneParameters(FinetuneMode::kFmvp, &vision_store, rng);
  const GaussianPolicy vision = FinetunePolicy(FinetuneMode::kVisionOnly);
  const GaussianPolicy fmvp = FinetunePolicy(FinetuneMode::kFmvp);
  Rng draw(3);
  for (int k = 0; k < 100; ++k) {
    Observation obs = ResetObservation(100 + k / 5);
    for (int i = 0; i < 3; ++i) {
      obs.force.raw[i] = 20 * NormalDraw(draw);
      obs.force.smoothed[i] = 20 * NormalDraw(draw);
    }
    const auto a = vision.Forward(vision_store, obs);
    const auto b = fmvp.Forward(fmvp_store, obs);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.log_std, b.log_std);
  }
}

TEST(InitFinetuneTest, RejectsMissingOrMismatchedCheckpoint) {
  Rng rng(1);
  EXPECT_THROW(InitFinetuneParameters(FinetuneMode::kFmvp, nullptr, rng), ContractError);
  EXPECT_NO_THROW(InitFinetuneParameters(FinetuneMode::kScratchFilm, nullptr, rng));

  nn::ParameterStore film;
  FinetunePolicy(FinetuneMode::kFmvp).Init(film, rng);
  EXPECT_THROW(InitFinetuneParameters(FinetuneMode::kFmvp, &film, rng), ContractError);

  nn::ParameterStore narrow;
  nn::PointNetConfig cfg = PolicyNetConfig(nn::ForceMode::kNone);
  cfg.global_width = 64;
  GaussianPolicy(cfg).Init(narrow, rng);
  EXPECT_THROW(InitFinetuneParameters(FinetuneMode::kVisionOnly, &narrow, rng),
               ContractError);
}

TEST(FinetuneTest, ForceOnlyLeavesEncoderUntouched) {
  const nn::ParameterStore vision_store = VisionCheckpoint(5);
  FinetuneConfig cfg;
  cfg.mode = FinetuneMode::kForceOnly;
  cfg.steps = 3;
  cfg.iql.batch = 4;
  cfg.iql.lr = 1e-2;
  const FinetuneResult r = Finetune(Labeled(), &vision_store, cfg);
  ASSERT_EQ(r.log.size(), 3u);
  const GaussianPolicy pi = FinetunePolicy(cfg.mode);
  int encoder = 0, moved = 0;
  for (const auto& [name, e] : r.policy.entries()) {
    bool in_encoder = false;
    for (const std::string& p : pi.net().EncoderPrefixes()) {
      in_encoder |= name.compare(0, p.size(), p) == 0;
    }
    if (in_encoder) {
      ++encoder;
      EXPECT_EQ(e.values, vision_store.Get(name).values) << name;
    } else if (vision_store.Has(name) && e.values != vision_store.Get(name).values) {
      ++moved;
    }
    EXPECT_FALSE(e.frozen) << name;
  }
  EXPECT_GT(encoder, 0);
  EXPECT_GT(moved, 0);
}

TEST(FinetuneTest, DeterministicForSeed) {
  const nn::ParameterStore vision_store = VisionCheckpoint(6);
  FinetuneConfig cfg;
  cfg.steps = 2;
  cfg.iql.batch = 4;
  cfg.seed = 9;
  const FinetuneResult a = Finetune(Labeled(), &vision_store, cfg);
  const FinetuneResult b = Finetune(Labeled(), &vision_store, cfg);
  for (const auto& [name, e] : a.policy.entries()) EXPECT_EQ(e.values, b.policy.Get(name).values);
  EXPECT_EQ(a.log.back().pi_loss, b.log.back().pi_loss);
}

TEST(FinetuneTest, BcModeLogsNll) {
  const nn::ParameterStore vision_store = VisionCheckpoint(7);
  FinetuneConfig cfg;
  cfg.mode = FinetuneMode::kBc;
  cfg.steps = 2;
  cfg.iql.batch = 4;
  const FinetuneResult r = Finetune(Labeled(), &vision_store, cfg);
  ASSERT_EQ(r.log.size(), 2u);
  EXPECT_EQ(r.log[0].v_loss, 0.0);
}

TEST(FinetuneTest, RejectsEmptyData) {
  FinetuneConfig cfg;
  cfg.mode = FinetuneMode::kScratchFilm;
  EXPECT_THROW(Finetune({}, nullptr, cfg), ContractError);
}

}  // namespace
}  // namespace dresslab
