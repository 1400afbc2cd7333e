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


// Implicit Q-learning on labeled trajectories, plus a tabular variant used to
// validate the update rules against value iteration.

#ifndef DRESSLAB_IQL_H_
#define DRESSLAB_IQL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dresslab/policy.h"

namespace dresslab {

struct IqlHyper {
  double expectile_tau = 0.7;
  double beta_temp = 3.0;
  double discount = 0.99;
  double polyak = 0.005;
  double adv_clip = 4.605170185988092;  // ln 100: exp-weights stay <= 100
  int batch = 128;
  double lr = 1e-4;

  // Throws RangeError on out-of-range fields.
  void Validate() const;
};

// rho_tau(u) = |tau - 1{u < 0}| * u^2 and its derivative in u.
double ExpectileLoss(double u, double tau);
double ExpectileGrad(double u, double tau);
// exp(min(beta * adv, adv_clip)).
double AwrWeight(double adv, double beta, double adv_clip);

struct Transition {
  const Observation* obs = nullptr;
  const Observation* next = nullptr;  // equals obs on terminal steps
  Vec6 action_n = Vec6::Zero();
  double reward = 0.0;
  bool done = false;
};

// One transition per step; actions are normalized by `clip`.
std::vector<Transition> CollectTransitions(const std::vector<Trajectory>& ts,
                                           const ActionClip& clip);

// Scalar classification critic sharing the policy encoder layout. Q reads
// [a_n; 0.1 * force] as extra inputs, V only the force term; without
// `force_aware` the force term is dropped.
nn::PointNetConfig CriticNetConfig(const nn::PointNetConfig& policy,
                                   const std::string& prefix, bool with_action,
                                   bool force_aware);

struct IqlNets {
  IqlNets(GaussianPolicy policy, bool force_aware);

  GaussianPolicy pi;
  nn::PointNet q;
  nn::PointNet v;
  bool force_aware;
  nn::ParameterStore pi_store, q_store, q_target, v_store;

  // Fresh critic parameters; the target starts as a copy of Q. When
  // `encoder_from` is given the critics' set-abstraction and global layers
  // are copied from that policy store.
  void InitCritics(Rng& rng, const nn::ParameterStore* encoder_from = nullptr);
  double Q(const nn::ParameterStore& store, const Observation& obs,
           const Vec6& a_n, nn::PointNetCache* cache = nullptr) const;
  double V(const Observation& obs, nn::PointNetCache* cache = nullptr) const;
};

// Copies every entry of `src` named src_prefix + rest into `dst` as
// dst_prefix + rest when that entry exists there with the same shape and
// rest starts with one of `parts` (all when empty). Returns the count.
int CopyRenamed(const nn::ParameterStore& src, const std::string& src_prefix,
                nn::ParameterStore& dst, const std::string& dst_prefix,
                const std::vector<std::string>& parts = {});

struct IqlLosses {
  double v_loss = 0.0;
  double q_loss = 0.0;
  double pi_loss = 0.0;
  double mean_advantage = 0.0;
};

// One IQL step on `batch`: expectile value regression, TD regression of Q
// onto r + discount * (1 - done) * V(o'), advantage-weighted NLL for the
// policy, then Polyak averaging of the target. Advantages and the TD target
// use values from before this step's updates.
IqlLosses IqlUpdate(IqlNets& nets, const std::vector<const Transition*>& batch,
                    const IqlHyper& h);

// Tabular IQL over discrete states and actions with a softmax policy.

struct TabularTransition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  bool done = false;
};

struct TabularIqlResult {
  Eigen::MatrixXd q;       // states x actions
  Eigen::VectorXd v;       // states
  Eigen::MatrixXd logits;  // states x actions
  std::vector<int> greedy;  // argmax of the policy logits per state
};

// Minibatch gradient descent with step size h.lr for `steps` iterations on
// the same three losses as IqlUpdate.
TabularIqlResult TabularIql(int n_states, int n_actions,
                            const std::vector<TabularTransition>& data,
                            const IqlHyper& h, int steps, uint64_t seed);

}  // namespace dresslab

#endif  // DRESSLAB_IQL_H_
