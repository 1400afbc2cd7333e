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


#include "config_io.h"

#include <fstream>
#include <set>

namespace dresslab {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw RangeError(where_ + ": expected an object");
  }
  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw RangeError(where_ + "." + key + ": wrong type");
    }
  }
  const json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw RangeError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

MotionSpec ParseMotionLabel(const std::string& label) {
  for (const MotionSpec& m : AllMotions()) {
    if (m.Label() == label) return m;
  }
  throw RangeError("unknown motion '" + label + "'");
}

EvalGrid ParseGrid(const json& j, EvalGrid g) {
  Reader r(j, "grid");
  r.Get("garments", g.garments);
  for (const std::string& name : g.garments) GarmentProfile(name);
  if (const json* m = r.Child("motions")) {
    g.motions.clear();
    for (const std::string& label : m->get<std::vector<std::string>>()) {
      g.motions.push_back(ParseMotionLabel(label));
    }
  }
  if (const json* s = r.Child("sizes")) {
    g.sizes.clear();
    for (const std::string& name : s->get<std::vector<std::string>>()) {
      g.sizes.push_back(ParseSizeClass(name));
    }
  }
  r.Get("trials", g.trials);
  r.Finish();
  if (g.trials < 1) throw RangeError("grid.trials must be positive");
  return g;
}

}  // namespace

PipelineConfig ParsePipelineConfig(const json& j, PipelineConfig c) {
  Reader r(j, "config");
  r.Get("seed", c.seed);
  r.Get("source_episodes", c.source_episodes);
  r.Get("target_episodes", c.target_episodes);
  r.Get("oracle_pairs", c.oracle_pairs);
  r.Get("time_pairs", c.time_pairs);
  r.Get("force_weight", c.force_weight);
  r.Get("finetune_steps", c.finetune_steps);
  std::string turn = c.turn_test == TurnTestVariant::kDot ? "dot" : "cross-xz";
  r.Get("turn_test", turn);
  if (turn == "cross-xz") {
    c.turn_test = TurnTestVariant::kCrossXZ;
  } else if (turn == "dot") {
    c.turn_test = TurnTestVariant::kDot;
  } else {
    throw RangeError("turn_test must be cross-xz or dot");
  }
  if (const json* e = r.Child("expert")) {
    Reader x(*e, "expert");
    x.Get("noise", c.expert.noise);
    x.Get("rotation_noise", c.expert.rotation_noise);
    x.Get("early_turn_prob", c.expert.early_turn_prob);
    x.Finish();
  }
  if (const json* b = r.Child("bc")) {
    Reader x(*b, "bc");
    x.Get("steps", c.bc.steps);
    x.Get("lr", c.bc.lr);
    x.Get("batch", c.bc.batch);
    x.Finish();
  }
  if (const json* o = r.Child("oracle")) {
    Reader x(*o, "oracle");
    x.Get("margin", c.oracle.margin);
    x.Get("flip_prob", c.oracle.flip_prob);
    x.Finish();
  }
  if (const json* w = r.Child("reward")) {
    Reader x(*w, "reward");
    x.Get("max_epochs", c.reward.max_epochs);
    x.Get("lr", c.reward.lr);
    x.Get("batch", c.reward.batch);
    x.Get("heldout_fraction", c.reward.heldout_fraction);
    x.Get("patience", c.reward.patience);
    x.Get("max_steps_per_epoch", c.reward.max_steps_per_epoch);
    x.Finish();
  }
  if (const json* q = r.Child("iql")) {
    Reader x(*q, "iql");
    x.Get("expectile_tau", c.iql.expectile_tau);
    x.Get("beta_temp", c.iql.beta_temp);
    x.Get("discount", c.iql.discount);
    x.Get("polyak", c.iql.polyak);
    x.Get("adv_clip", c.iql.adv_clip);
    x.Get("batch", c.iql.batch);
    x.Get("lr", c.iql.lr);
    x.Finish();
  }
  if (const json* f = r.Child("force_dynamics")) {
    Reader x(*f, "force_dynamics");
    x.Get("hidden", c.force_dynamics.hidden);
    x.Get("steps", c.force_dynamics.steps);
    x.Get("batch", c.force_dynamics.batch);
    x.Get("lr", c.force_dynamics.lr);
    x.Finish();
  }
  if (const json* g = r.Child("grid")) c.grid = ParseGrid(*g, c.grid);
  r.Finish();
  c.iql.Validate();
  if (c.source_episodes < 0 || c.target_episodes < 0 || c.oracle_pairs < 0 ||
      c.time_pairs < 0 || c.finetune_steps < 0) {
    throw RangeError("episode, pair and step counts must be non-negative");
  }
  return c;
}

PipelineConfig LoadPipelineConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RangeError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw RangeError("config " + path + " is not valid JSON: " + e.what());
  }
  return ParsePipelineConfig(j);
}

json PipelineConfigJson(const PipelineConfig& c) {
  json grid{{"garments", c.grid.garments}, {"trials", c.grid.trials}};
  for (const MotionSpec& m : c.grid.motions) grid["motions"].push_back(m.Label());
  for (SizeClass s : c.grid.sizes) grid["sizes"].push_back(std::string(SizeClassName(s)));
  return {
      {"seed", c.seed},
      {"source_episodes", c.source_episodes},
      {"target_episodes", c.target_episodes},
      {"oracle_pairs", c.oracle_pairs},
      {"time_pairs", c.time_pairs},
      {"force_weight", c.force_weight},
      {"finetune_steps", c.finetune_steps},
      {"turn_test", c.turn_test == TurnTestVariant::kDot ? "dot" : "cross-xz"},
      {"expert",
       {{"noise", c.expert.noise},
        {"rotation_noise", c.expert.rotation_noise},
        {"early_turn_prob", c.expert.early_turn_prob}}},
      {"bc", {{"steps", c.bc.steps}, {"lr", c.bc.lr}, {"batch", c.bc.batch}}},
      {"oracle", {{"margin", c.oracle.margin}, {"flip_prob", c.oracle.flip_prob}}},
      {"reward",
       {{"max_epochs", c.reward.max_epochs},
        {"lr", c.reward.lr},
        {"batch", c.reward.batch},
        {"heldout_fraction", c.reward.heldout_fraction},
        {"patience", c.reward.patience},
        {"max_steps_per_epoch", c.reward.max_steps_per_epoch}}},
      {"iql",
       {{"expectile_tau", c.iql.expectile_tau},
        {"beta_temp", c.iql.beta_temp},
        {"discount", c.iql.discount},
        {"polyak", c.iql.polyak},
        {"adv_clip", c.iql.adv_clip},
        {"batch", c.iql.batch},
        {"lr", c.iql.lr}}},
      {"force_dynamics",
       {{"hidden", c.force_dynamics.hidden},
        {"steps", c.force_dynamics.steps},
        {"batch", c.force_dynamics.batch},
        {"lr", c.force_dynamics.lr}}},
      {"grid", grid},
  };
}

}  // namespace dresslab
