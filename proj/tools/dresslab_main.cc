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


// dresslab: run the pipeline stage by stage from the command line.
//
//   dresslab --out run collect --domain source
//   dresslab --out run distill
//   dresslab --out run collect --domain target
//   dresslab --out run train-reward
//   dresslab --out run label
//   dresslab --out run finetune --mode fmvp
//   dresslab --out run eval --mode fmvp
//   dresslab --out run plot

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "config_io.h"
#include "dresslab/pipeline.h"

namespace fs = std::filesystem;

namespace dresslab {
namespace {

struct Globals {
  std::string config;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "out";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PipelineConfig Config(const Globals& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : LoadPipelineConfig(g.config);
  if (g.seed_set) c.seed = g.seed;
  return c;
}

std::string OrDefault(const std::string& value, const fs::path& fallback) {
  return value.empty() ? fallback.string() : value;
}

void RequireFile(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw UsageError(what + " not found at " + path);
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void PrintReasons(const std::array<int, kTerminationCount>& reasons) {
  for (int k = 0; k < kTerminationCount; ++k) {
    std::printf(" %s=%d", std::string(TerminationName(kAllTerminations[k])).c_str(),
                reasons[k]);
  }
  std::printf("\n");
}

ForceDynamics LoadDynamics(const std::string& path, const PipelineConfig& cfg) {
  RequireFile(path, "force dynamics checkpoint");
  const GaussianPolicy pi(PolicyNetConfig(nn::ForceMode::kNone));
  ForceDynamics model(pi.config().fp_widths.back(), cfg.force_dynamics);
  Rng rng(0);
  model.Init(rng);
  nn::ParameterStore loaded = nn::LoadParameters(path);
  for (const auto& [name, entry] : model.store().entries()) {
    if (!loaded.Has(name) || loaded.Get(name).shape != entry.shape) {
      throw ContractError("force dynamics checkpoint does not match the configured model");
    }
  }
  model.store() = std::move(loaded);
  return model;
}

int Collect(const Globals& g, const std::string& domain, int episodes,
            const std::string& policy_path) {
  PipelineConfig cfg = Config(g);
  std::vector<Trajectory> ts;
  if (domain == "source") {
    if (episodes >= 0) cfg.source_episodes = episodes;
    ts = CollectSource(cfg);
  } else {
    if (episodes >= 0) cfg.target_episodes = episodes;
    const std::string path = OrDefault(policy_path, fs::path(g.out) / "vision.ckpt");
    RequireFile(path, "vision checkpoint");
    ts = CollectTarget(nn::LoadParameters(path), cfg);
  }
  const fs::path dir = fs::path(g.out) / domain;
  fs::create_directories(dir);
  SaveTrajectories(ts, dir.string());
  int steps = 0;
  double upper = 0.0;
  for (const Trajectory& t : ts) {
    steps += t.size();
    upper += ComputeDressedRatios(t).upper / std::max<std::size_t>(ts.size(), 1);
  }
  std::printf("%zu %s trajectories, %d steps, mean upper ratio %.3f -> %s\n", ts.size(),
              domain.c_str(), steps, upper, dir.c_str());
  return 0;
}

std::vector<Trajectory> LoadData(const std::string& dir, const std::string& what) {
  if (!fs::is_directory(dir)) throw UsageError(what + " directory not found at " + dir);
  std::vector<Trajectory> ts = LoadTrajectories(dir);
  if (ts.empty()) throw UsageError(what + " directory " + dir + " holds no trajectories");
  return ts;
}

int Distill(const Globals& g, const std::string& data) {
  const PipelineConfig cfg = Config(g);
  const std::vector<Trajectory> source =
      LoadData(OrDefault(data, fs::path(g.out) / "source"), "SOURCE data");
  const DistillResult r = DistillVision(source, cfg);
  const fs::path path = fs::path(g.out) / "vision.ckpt";
  nn::SaveParameters(r.policy, path.string());
  std::printf("kept %zu of %zu trajectories, final loss %.4f -> %s\n", r.kept.size(),
              source.size(), r.loss.empty() ? 0.0 : r.loss.back(), path.c_str());
  return 0;
}

int TrainRewardCmd(const Globals& g, const std::string& data) {
  const PipelineConfig cfg = Config(g);
  const std::vector<Trajectory> target =
      LoadData(OrDefault(data, fs::path(g.out) / "target"), "TARGET data");
  const RewardStageResult r = TrainReward(target, cfg);
  SavePreferences(r.pairs, (fs::path(g.out) / "preferences.drp").string());
  const fs::path path = fs::path(g.out) / "reward.ckpt";
  r.model.Save(path.string());
  const double depth = DepthOrderAccuracy(r.model, target, 2000, cfg.oracle.margin,
                                          StageSeed(cfg.seed, Stage::kReward));
  std::printf("%zu pairs, %d epochs, held-out accuracy %.3f, depth-order accuracy %.3f -> %s\n",
              r.pairs.size(), r.train.epochs, r.train.heldout_accuracy, depth, path.c_str());
  return 0;
}

int Label(const Globals& g, const std::string& data, const std::string& reward) {
  const PipelineConfig cfg = Config(g);
  std::vector<Trajectory> target =
      LoadData(OrDefault(data, fs::path(g.out) / "target"), "TARGET data");
  const std::string path = OrDefault(reward, fs::path(g.out) / "reward.ckpt");
  RequireFile(path, "reward checkpoint");
  const double normalizer = LabelTarget(target, RewardModel::Load(path), cfg);
  const fs::path dir = fs::path(g.out) / "labeled";
  fs::create_directories(dir);
  SaveTrajectories(target, dir.string());
  std::printf("labeled %zu trajectories, force normalizer %.3f N -> %s\n", target.size(),
              normalizer, dir.c_str());
  return 0;
}

int FinetuneCmd(const Globals& g, const std::string& mode, const std::string& data,
                const std::string& pretrained) {
  const PipelineConfig cfg = Config(g);
  const std::string vision_path = OrDefault(pretrained, fs::path(g.out) / "vision.ckpt");
  RequireFile(vision_path, "vision checkpoint");
  const nn::ParameterStore vision = nn::LoadParameters(vision_path);
  if (mode == "fcvp") {
    const std::vector<Trajectory> target =
        LoadData(OrDefault(data, fs::path(g.out) / "target"), "TARGET data");
    const ForceDynamics model = TrainForceDynamics(target, vision, cfg);
    const fs::path path = fs::path(g.out) / "fcvp_dynamics.ckpt";
    nn::SaveParameters(model.store(), path.string());
    std::printf("force dynamics trained on %zu trajectories -> %s\n", target.size(),
                path.c_str());
    return 0;
  }
  const std::vector<Trajectory> labeled =
      LoadData(OrDefault(data, fs::path(g.out) / "labeled"), "labeled data");
  const FinetuneResult r = RunFinetune(labeled, vision, ParseFinetuneMode(mode), cfg);
  const fs::path path = fs::path(g.out) / (mode + ".ckpt");
  nn::SaveParameters(r.policy, path.string());
  if (!r.log.empty()) {
    const IqlLosses& l = r.log.back();
    std::printf("%zu steps, final v %.4f q %.4f pi %.4f -> %s\n", r.log.size(), l.v_loss,
                l.q_loss, l.pi_loss, path.c_str());
  }
  return 0;
}

int Eval(const Globals& g, const std::string& mode, const std::string& checkpoint,
         const std::string& dynamics) {
  const PipelineConfig cfg = Config(g);
  const bool vision_based = mode == "vision" || mode == "fcvp";
  const std::string path = OrDefault(
      checkpoint, fs::path(g.out) / (vision_based ? "vision.ckpt" : mode + ".ckpt"));
  RequireFile(path, mode + " checkpoint");
  std::shared_ptr<const ForceDynamics> model;
  if (mode == "fcvp") {
    model = std::make_shared<const ForceDynamics>(
        LoadDynamics(OrDefault(dynamics, fs::path(g.out) / "fcvp_dynamics.ckpt"), cfg));
  }
  MethodPolicy m(mode, nn::LoadParameters(path), model);
  const EvalReport r = Evaluate(m, cfg);
  fs::create_directories(g.out);
  const fs::path csv = fs::path(g.out) / ("eval_" + mode + ".csv");
  WriteText(csv, r.CellsCsv());
  std::printf("%s: %d episodes, upper %.3f, whole %.3f;", mode.c_str(), r.Episodes(mode),
              r.MeanUpper(mode), r.MeanWhole(mode));
  PrintReasons(r.Reasons(mode));
  std::printf("-> %s\n", csv.c_str());
  return 0;
}

int Plot(const Globals& g, std::vector<std::string> inputs) {
  if (inputs.empty()) {
    for (const std::string& m : EvalMethods()) {
      const fs::path p = fs::path(g.out) / ("eval_" + m + ".csv");
      if (fs::exists(p)) inputs.push_back(p.string());
    }
  }
  if (inputs.empty()) throw UsageError("no evaluation results in " + g.out);
  EvalReport all;
  for (const std::string& p : inputs) MergeReports(all, EvalReport::FromCellsCsv(ReadText(p)));
  std::printf("%s\n%s", all.SizeTable().c_str(), all.MotionTable().c_str());
  fs::create_directories(g.out);
  WriteText(fs::path(g.out) / "table_size.csv", all.SizeCsv());
  WriteText(fs::path(g.out) / "table_motion.csv", all.MotionCsv());
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Robot-assisted dressing: data collection, training and evaluation"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Globals g;
  app.add_option("--config", g.config, "JSON pipeline configuration")->check(CLI::ExistingFile);
  app.add_option_function<uint64_t>(
      "--seed", [&](uint64_t s) { g.seed = s, g.seed_set = true; }, "master seed");
  app.add_option("--out", g.out, "run directory")->capture_default_str();

  std::vector<std::string> finetune_modes;
  for (FinetuneMode m : kAllFinetuneModes) finetune_modes.emplace_back(FinetuneModeName(m));
  finetune_modes.push_back("fcvp");

  std::string domain = "source", data, policy, reward, mode, checkpoint, dynamics, pretrained;
  int episodes = -1;
  std::vector<std::string> inputs;

  auto* collect = app.add_subcommand("collect", "roll out SOURCE expert or TARGET vision episodes");
  collect->add_option("--domain", domain)->check(CLI::IsMember({"source", "target"}));
  collect->add_option("--episodes", episodes, "override the configured count")
      ->check(CLI::NonNegativeNumber);
  collect->add_option("--policy", policy, "vision checkpoint for TARGET collection");

  auto* distill = app.add_subcommand("distill", "filter SOURCE data and train the vision policy");
  distill->add_option("--data", data);

  auto* train_reward = app.add_subcommand("train-reward", "learn the preference reward model");
  train_reward->add_option("--data", data);

  auto* label = app.add_subcommand("label", "write composite rewards into TARGET data");
  label->add_option("--data", data);
  label->add_option("--reward", reward);

  auto* finetune = app.add_subcommand("finetune", "fine-tune a policy or train the FCVP model");
  finetune->add_option("--mode", mode)->required()->check(CLI::IsMember(finetune_modes));
  finetune->add_option("--data", data);
  finetune->add_option("--pretrained", pretrained);

  auto* eval = app.add_subcommand("eval", "evaluate one method on the configured grid");
  eval->add_option("--mode", mode)->required()->check(CLI::IsMember(EvalMethods()));
  eval->add_option("--checkpoint", checkpoint);
  eval->add_option("--dynamics", dynamics, "FCVP force dynamics checkpoint");

  auto* plot = app.add_subcommand("plot", "print size and motion tables");
  plot->add_option("inputs", inputs, "evaluation CSV files (default: every eval_*.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*collect) return Collect(g, domain, episodes, policy);
    if (*distill) return Distill(g, data);
    if (*train_reward) return TrainRewardCmd(g, data);
    if (*label) return Label(g, data, reward);
    if (*finetune) return FinetuneCmd(g, mode, data, pretrained);
    if (*eval) return Eval(g, mode, checkpoint, dynamics);
    if (*plot) return Plot(g, inputs);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace dresslab

int main(int argc, char** argv) { return dresslab::Main(argc, argv); }
