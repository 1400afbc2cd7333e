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


#include "dresslab/fcvp.h"

#include <algorithm>

namespace dresslab {
namespace {

constexpr double kHistoryScale = 0.1;

}  // namespace

std::vector<ForceWindowSample> BuildForceWindows(
    const std::vector<Trajectory>& ts, const GaussianPolicy& vision,
    const nn::ParameterStore& vision_store) {
  std::vector<ForceWindowSample> out;
  for (const Trajectory& t : ts) {
    for (int i = kForceWindow - 1; i + kForceWindow <= t.size(); ++i) {
      ForceWindowSample w;
      nn::PointNetCache cache;
      vision.Forward(vision_store, t.steps[i].obs, &cache);
      w.latent = vision.net().Latent(cache);
      w.action_n = NormalizeAction(t.steps[i].action, vision.clip());
      for (int k = 0; k < kForceWindow; ++k) {
        w.history[k] = t.steps[i - kForceWindow + 1 + k].obs.force.raw;
        w.target += t.privileged[i + k].raw_force.norm();
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

ForceDynamics::ForceDynamics(int latent_width, ForceDynamicsConfig cfg)
    : latent_width_(latent_width), cfg_(std::move(cfg)) {
  if (latent_width < 1) throw RangeError("latent width must be positive");
  if (!(cfg_.target_scale > 0.0)) throw RangeError("target_scale must be positive");
  spec_.name = "fdyn";
  spec_.widths = {latent_width + kActionDim + 3 * kForceWindow};
  for (int h : cfg_.hidden) spec_.widths.push_back(h);
  spec_.widths.push_back(1);
  spec_.final_relu = false;
}

void ForceDynamics::Init(Rng& rng) {
  store_ = nn::ParameterStore();
  nn::AddMlp(store_, spec_, rng);
}

nn::Vec ForceDynamics::Input(const nn::Vec& latent, const Vec6& action_n,
                             const std::array<Vec3, kForceWindow>& history) const {
  if (latent.size() != latent_width_) throw ContractError("latent width mismatch");
  nn::Vec x(spec_.in());
  x.head(latent_width_) = latent;
  x.segment<kActionDim>(latent_width_) = action_n;
  for (int k = 0; k < kForceWindow; ++k) {
    x.segment<3>(latent_width_ + kActionDim + 3 * k) = kHistoryScale * history[k];
  }
  return x;
}

double ForceDynamics::Predict(const nn::Vec& latent, const Vec6& action_n,
                              const std::array<Vec3, kForceWindow>& history) const {
  const nn::Mat y =
      nn::MlpForward(store_, spec_, Input(latent, action_n, history), nullptr);
  return cfg_.target_scale * y(0, 0);
}

std::vector<double> ForceDynamics::Train(const std::vector<ForceWindowSample>& data) {
  if (data.empty()) throw ContractError("force dynamics needs training windows");
  if (cfg_.batch < 1 || cfg_.steps < 0) throw RangeError("bad force dynamics schedule");
  Rng rng(SplitSeed(cfg_.seed, 0xFD));
  if (store_.entries().empty()) Init(rng);
  std::vector<double> losses;
  const int n = cfg_.batch;
  nn::Mat x(spec_.in(), n);
  nn::Vec target(n);
  for (int step = 0; step < cfg_.steps; ++step) {
    for (int b = 0; b < n; ++b) {
      const ForceWindowSample& s = data[IndexDraw(rng, data.size())];
      x.col(b) = Input(s.latent, s.action_n, s.history);
      target[b] = s.target / cfg_.target_scale;
    }
    nn::MlpCache cache;
    const nn::Mat y = nn::MlpForward(store_, spec_, x, &cache);
    const nn::Mat err = y.row(0).transpose() - target;
    losses.push_back(err.squaredNorm() / n * cfg_.target_scale * cfg_.target_scale);
    store_.ZeroGrad();
    nn::MlpBackward(store_, spec_, cache, (2.0 / n) * err.transpose());
    store_.AdamStep({.lr = cfg_.lr});
  }
  return losses;
}

int FcvpSelect(const std::vector<double>& log_probs,
               const std::vector<double>& predicted, double threshold) {
  if (log_probs.empty()) throw ContractError("FCVP needs at least one candidate");
  if (log_probs.size() != predicted.size()) {
    throw ContractError("FCVP candidate and prediction counts differ");
  }
  int best = -1;
  for (int i = 0; i < static_cast<int>(predicted.size()); ++i) {
    if (predicted[i] > threshold) continue;
    if (best < 0 || log_probs[i] > log_probs[best]) best = i;
  }
  if (best >= 0) return best;
  best = 0;
  for (int i = 1; i < static_cast<int>(predicted.size()); ++i) {
    if (predicted[i] < predicted[best]) best = i;
  }
  return best;
}

FcvpPolicy::FcvpPolicy(const GaussianPolicy& vision, const nn::ParameterStore& store,
                       const ForceDynamics& dynamics, int candidates,
                       double threshold)
    : vision_(vision),
      store_(store),
      dynamics_(dynamics),
      candidates_(candidates),
      threshold_(threshold) {
  if (candidates < 1) throw RangeError("FCVP needs at least one candidate");
}

Vec6 FcvpPolicy::Act(const Observation& obs, const PolicyContext& ctx, Rng& rng) {
  nn::PointNetCache cache;
  const GaussianPolicy::Output out = vision_.Forward(store_, obs, &cache);
  const nn::Vec latent = vision_.net().Latent(cache);
  std::array<Vec3, kForceWindow> history;
  history.fill(Vec3::Zero());
  if (ctx.force_history != nullptr) {
    const auto& h = *ctx.force_history;
    const int have = std::min<int>(kForceWindow, static_cast<int>(h.size()));
    for (int k = 0; k < have; ++k) {
      history[kForceWindow - have + k] = h[h.size() - have + k];
    }
  } else {
    history.back() = obs.force.raw;
  }
  std::vector<Vec6> cands(candidates_);
  std::vector<double> log_probs(candidates_), predicted(candidates_);
  for (int i = 0; i < candidates_; ++i) {
    cands[i] = i == 0 ? out.mean : Vec6(nn::GaussianSample(out.mean, out.log_std, rng));
    log_probs[i] = vision_.LogProb(out, cands[i]);
    predicted[i] = dynamics_.Predict(latent, cands[i], history);
  }
  return DenormalizeAction(cands[FcvpSelect(log_probs, predicted, threshold_)],
                           vision_.clip());
}

}  // namespace dresslab
