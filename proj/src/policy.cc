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

#include "dresslab/policy.h"

#include <algorithm>

namespace dresslab {

Vec6 NormalizeAction(const Vec6& a, const ActionClip& clip) {
  Vec6 out;
  out.head<3>() = a.head<3>() / clip.translation;
  out.tail<3>() = a.tail<3>() / clip.rotation;
  return out;
}

Vec6 DenormalizeAction(const Vec6& a_n, const ActionClip& clip) {
  Vec6 out;
  out.head<3>() = a_n.head<3>() * clip.translation;
  out.tail<3>() = a_n.tail<3>() * clip.rotation;
  return out;
}

nn::PointNetConfig PolicyNetConfig(nn::ForceMode force_mode,
                                   const std::string& prefix) {
  nn::PointNetConfig cfg;
  cfg.prefix = prefix;
  cfg.mode = nn::NetMode::kSegmentation;
  cfg.force_mode = force_mode;
  cfg.sa_radii = {0.05, 0.10};
  cfg.sa_ratios = {0.25, 0.25};
  cfg.nsample = 16;
  cfg.sa_widths = {32, 64};
  cfg.global_width = 128;
  cfg.fp_neighbors = {1, 3, 3};
  cfg.fp_widths = {64, 64, 32};
  cfg.head_hidden = {64};
  cfg.output_dim = 2 * kActionDim;
  cfg.film_hidden = 32;
  return cfg;
}

GaussianPolicy::GaussianPolicy(nn::PointNetConfig cfg, ActionClip clip)
    : net_(std::move(cfg)), clip_(clip) {
  if (net_.config().output_dim != 2 * kActionDim) {
    throw ContractError("policy network must output 12 values");
  }
}

GaussianPolicy::Output GaussianPolicy::Forward(const nn::ParameterStore& store,
                                               const Observation& obs,
                                               nn::PointNetCache* cache) const {
  nn::Vec y = net_.Forward(store, obs, obs.force.smoothed, nn::Vec(), cache);
  Output out;
  out.mean = y.head<kActionDim>();
  out.raw_log_std = y.tail<kActionDim>();
  for (int i = 0; i < kActionDim; ++i) {
    out.log_std[i] = std::clamp(out.raw_log_std[i], nn::kLogStdMin, nn::kLogStdMax);
  }
  return out;
}

double GaussianPolicy::LogProb(const Output& out, const Vec6& action_n) const {
  return nn::GaussianLogProb(out.mean, out.log_std, action_n);
}

double GaussianPolicy::Nll(const nn::ParameterStore& store,
                           const Observation& obs, const Vec6& action_n) const {
  return -LogProb(Forward(store, obs), action_n);
}

double GaussianPolicy::NllBackward(nn::ParameterStore& store,
                                   const Observation& obs, const Vec6& action_n,
                                   double weight) const {
  nn::PointNetCache cache;
  Output out = Forward(store, obs, &cache);
  nn::Vec dmean, dlog_std;
  nn::GaussianLogProbGrad(out.mean, out.log_std, action_n, &dmean, &dlog_std);
  nn::Vec dout(2 * kActionDim);
  for (int i = 0; i < kActionDim; ++i) {
    dout[i] = -weight * dmean[i];
    const bool clamped = out.raw_log_std[i] < nn::kLogStdMin ||
                         out.raw_log_std[i] > nn::kLogStdMax;
    dout[kActionDim + i] = clamped ? 0.0 : -weight * dlog_std[i];
  }
  net_.Backward(store, cache, dout, nullptr, nullptr);
  return -LogProb(out, action_n);
}

Vec6 NetworkPolicy::Act(const Observation& obs, const PolicyContext&, Rng& rng) {
  GaussianPolicy::Output out = pi_.Forward(store_, obs);
  Vec6 a_n = out.mean;
  if (stochastic_) a_n = nn::GaussianSample(out.mean, out.log_std, rng);
  return DenormalizeAction(a_n, pi_.clip());
}

}  // namespace dresslab
