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


#include "dresslab/iql.h"

#include <algorithm>
#include <cmath>

namespace dresslab {
namespace {

constexpr double kCriticForceScale = 0.1;

nn::Vec CriticExtra(const Observation& obs, const Vec6* a_n, bool force_aware) {
  const int n = (a_n ? kActionDim : 0) + (force_aware ? 3 : 0);
  nn::Vec e(n);
  int k = 0;
  if (a_n) {
    e.head<kActionDim>() = *a_n;
    k = kActionDim;
  }
  if (force_aware) e.segment<3>(k) = kCriticForceScale * obs.force.smoothed;
  return e;
}

}  // namespace

void IqlHyper::Validate() const {
  if (!(expectile_tau > 0.0 && expectile_tau < 1.0)) {
    throw RangeError("expectile_tau must lie in (0, 1)");
  }
  if (!(beta_temp > 0.0)) throw RangeError("beta_temp must be positive");
  if (!(discount > 0.0 && discount < 1.0)) throw RangeError("discount must lie in (0, 1)");
  if (!(polyak > 0.0 && polyak < 1.0)) throw RangeError("polyak must lie in (0, 1)");
  if (!std::isfinite(adv_clip)) throw RangeError("adv_clip must be finite");
  if (batch < 1) throw RangeError("batch must be positive");
  if (!(lr > 0.0)) throw RangeError("lr must be positive");
}

double ExpectileLoss(double u, double tau) {
  return std::abs(tau - (u < 0.0 ? 1.0 : 0.0)) * u * u;
}

double ExpectileGrad(double u, double tau) {
  return 2.0 * std::abs(tau - (u < 0.0 ? 1.0 : 0.0)) * u;
}

double AwrWeight(double adv, double beta, double adv_clip) {
  return std::exp(std::min(beta * adv, adv_clip));
}

std::vector<Transition> CollectTransitions(const std::vector<Trajectory>& ts,
                                           const ActionClip& clip) {
  std::vector<Transition> out;
  for (const Trajectory& t : ts) {
    for (int i = 0; i < t.size(); ++i) {
      const TrajectoryStep& s = t.steps[i];
      Transition tr;
      tr.obs = &s.obs;
      tr.done = s.done || i + 1 == t.size();
      tr.next = tr.done ? &s.obs : &t.steps[i + 1].obs;
      tr.action_n = NormalizeAction(s.action, clip);
      tr.reward = s.reward;
      out.push_back(tr);
    }
  }
  return out;
}

nn::PointNetConfig CriticNetConfig(const nn::PointNetConfig& policy,
                                   const std::string& prefix, bool with_action,
                                   bool force_aware) {
  nn::PointNetConfig cfg = policy;
  cfg.prefix = prefix;
  cfg.force_mode = nn::ForceMode::kNone;
  cfg.mode = nn::NetMode::kClassification;
  cfg.fp_neighbors.clear();
  cfg.fp_widths.clear();
  cfg.extra_inputs = (with_action ? kActionDim : 0) + (force_aware ? 3 : 0);
  cfg.output_dim = 1;
  cfg.head_gain = 1.0;
  return cfg;
}

IqlNets::IqlNets(GaussianPolicy policy, bool force_aware_in)
    : pi(std::move(policy)),
      q(CriticNetConfig(pi.config(), "q", true, force_aware_in)),
      v(CriticNetConfig(pi.config(), "v", false, force_aware_in)),
      force_aware(force_aware_in) {}

void IqlNets::InitCritics(Rng& rng, const nn::ParameterStore* encoder_from) {
  q_store = nn::ParameterStore();
  v_store = nn::ParameterStore();
  q.Init(q_store, rng);
  v.Init(v_store, rng);
  if (encoder_from != nullptr) {
    const std::string src = pi.config().prefix + "/";
    const std::vector<std::string> parts = {"sa", "global"};
    const int n_q = CopyRenamed(*encoder_from, src, q_store, "q/", parts);
    const int n_v = CopyRenamed(*encoder_from, src, v_store, "v/", parts);
    if (n_q == 0 || n_v == 0) {
      throw ContractError("pretrained store has no compatible encoder entries");
    }
  }
  q_target = q_store;
}

double IqlNets::Q(const nn::ParameterStore& store, const Observation& obs,
                  const Vec6& a_n, nn::PointNetCache* cache) const {
  return q.Forward(store, obs, Vec3::Zero(), CriticExtra(obs, &a_n, force_aware),
                   cache)[0];
}

double IqlNets::V(const Observation& obs, nn::PointNetCache* cache) const {
  return v.Forward(v_store, obs, Vec3::Zero(), CriticExtra(obs, nullptr, force_aware),
                   cache)[0];
}

int CopyRenamed(const nn::ParameterStore& src, const std::string& src_prefix,
                nn::ParameterStore& dst, const std::string& dst_prefix,
                const std::vector<std::string>& parts) {
  int copied = 0;
  for (const auto& [name, entry] : src.entries()) {
    if (name.compare(0, src_prefix.size(), src_prefix) != 0) continue;
    const std::string rest = name.substr(src_prefix.size());
    const bool wanted =
        parts.empty() || std::any_of(parts.begin(), parts.end(), [&](const std::string& p) {
          return rest.compare(0, p.size(), p) == 0;
        });
    if (!wanted) continue;
    const std::string target = dst_prefix + rest;
    if (!dst.Has(target)) continue;
    nn::ParamEntry& d = dst.Get(target);
    if (d.shape != entry.shape) continue;
    d.values = entry.values;
    ++copied;
  }
  return copied;
}

IqlLosses IqlUpdate(IqlNets& nets, const std::vector<const Transition*>& batch,
                    const IqlHyper& h) {
  h.Validate();
  if (batch.empty()) throw ContractError("empty IQL batch");
  const double n = static_cast<double>(batch.size());
  IqlLosses out;
  nets.q_store.ZeroGrad();
  nets.v_store.ZeroGrad();
  nets.pi_store.ZeroGrad();
  for (const Transition* t : batch) {
    const double q_t = nets.Q(nets.q_target, *t->obs, t->action_n);
    const double v_next = t->done ? 0.0 : nets.V(*t->next);
    nn::PointNetCache vc, qc;
    const double v = nets.V(*t->obs, &vc);
    const double q = nets.Q(nets.q_store, *t->obs, t->action_n, &qc);

    const double u = q_t - v;
    out.v_loss += ExpectileLoss(u, h.expectile_tau) / n;
    nets.v.Backward(nets.v_store, vc,
                    nn::Vec::Constant(1, -ExpectileGrad(u, h.expectile_tau) / n),
                    nullptr, nullptr);

    const double y = t->reward + h.discount * (t->done ? 0.0 : 1.0) * v_next;
    out.q_loss += (q - y) * (q - y) / n;
    nets.q.Backward(nets.q_store, qc, nn::Vec::Constant(1, 2.0 * (q - y) / n),
                    nullptr, nullptr);

    const double w = AwrWeight(u, h.beta_temp, h.adv_clip);
    out.pi_loss += w * nets.pi.NllBackward(nets.pi_store, *t->obs, t->action_n, w / n) / n;
    out.mean_advantage += u / n;
  }
  const nn::AdamOptions adam{.lr = h.lr};
  nets.v_store.AdamStep(adam);
  nets.q_store.AdamStep(adam);
  nets.pi_store.AdamStep(adam);
  nets.q_target.PolyakFrom(nets.q_store, h.polyak);
  return out;
}

TabularIqlResult TabularIql(int n_states, int n_actions,
                            const std::vector<TabularTransition>& data,
                            const IqlHyper& h, int steps, uint64_t seed) {
  h.Validate();
  if (n_states < 1 || n_actions < 1) throw RangeError("empty state or action space");
  if (data.empty()) throw ContractError("tabular IQL needs data");
  for (const TabularTransition& t : data) {
    if (t.s < 0 || t.s >= n_states || t.s_next < 0 || t.s_next >= n_states ||
        t.a < 0 || t.a >= n_actions) {
      throw RangeError("transition index out of range");
    }
  }
  TabularIqlResult r;
  r.q = Eigen::MatrixXd::Zero(n_states, n_actions);
  r.v = Eigen::VectorXd::Zero(n_states);
  r.logits = Eigen::MatrixXd::Zero(n_states, n_actions);
  Eigen::MatrixXd q_target = r.q;
  Rng rng(SplitSeed(seed, 0x1A1));
  const double inv = 1.0 / h.batch;
  for (int step = 0; step < steps; ++step) {
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(n_states, n_actions);
    Eigen::VectorXd dv = Eigen::VectorXd::Zero(n_states);
    Eigen::MatrixXd dl = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (int b = 0; b < h.batch; ++b) {
      const TabularTransition& t = data[IndexDraw(rng, data.size())];
      const double u = q_target(t.s, t.a) - r.v[t.s];
      dv[t.s] -= ExpectileGrad(u, h.expectile_tau) * inv;
      const double y = t.r + h.discount * (t.done ? 0.0 : r.v[t.s_next]);
      dq(t.s, t.a) += 2.0 * (r.q(t.s, t.a) - y) * inv;
      const double w = AwrWeight(u, h.beta_temp, h.adv_clip);
      const Eigen::RowVectorXd row = r.logits.row(t.s);
      Eigen::RowVectorXd p = (row.array() - row.maxCoeff()).exp();
      p /= p.sum();
      p[t.a] -= 1.0;
      dl.row(t.s) += w * inv * p;
    }
    r.v -= h.lr * dv;
    r.q -= h.lr * dq;
    r.logits -= h.lr * dl;
    q_target = (1.0 - h.polyak) * q_target + h.polyak * r.q;
  }
  r.greedy.resize(n_states);
  for (int s = 0; s < n_states; ++s) r.logits.row(s).maxCoeff(&r.greedy[s]);
  return r;
}

}  // namespace dresslab
