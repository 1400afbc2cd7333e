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

#include "dresslab/reward.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "dresslab/binary_io.h"
#include "dresslab/policy.h"

namespace dresslab {
namespace {

constexpr char kPrefMagic[4] = {'D', 'R', 'P', '1'};
constexpr char kNormEntry[] = "normalization";

const TrajectoryStep& StepAt(const std::vector<Trajectory>& ts, const StepRef& r) {
  if (r.traj < 0 || r.traj >= static_cast<int>(ts.size()) || r.step < 0 ||
      r.step >= ts[r.traj].size()) {
    throw ContractError("step reference out of range");
  }
  return ts[r.traj].steps[r.step];
}

// log p(winner beats loser) under Bradley-Terry.
double LogWin(double winner, double loser) {
  const double m = std::max(winner, loser);
  return winner - m - std::log(std::exp(winner - m) + std::exp(loser - m));
}

}  // namespace

int TimePreference(int i, int j) {
  if (i > j) return 0;
  if (i < j) return 1;
  return -1;
}

int OraclePreference(double depth_i, double depth_j, double margin,
                     double flip_prob, Rng& rng) {
  if (margin < 0.0) throw RangeError("oracle margin must be >= 0");
  if (flip_prob < 0.0 || flip_prob > 1.0) throw RangeError("flip_prob outside [0, 1]");
  if (std::abs(depth_i - depth_j) < margin) return -1;
  int y = depth_i > depth_j ? 0 : 1;
  if (flip_prob > 0.0 && UniformDraw(rng) < flip_prob) y = 1 - y;
  return y;
}

double BtProbability(double r0, double r1) {
  const double m = std::max(r0, r1);
  const double e0 = std::exp(r0 - m);
  const double e1 = std::exp(r1 - m);
  return e0 / (e0 + e1);
}

double BtLoss(const std::vector<double>& r0, const std::vector<double>& r1,
              const std::vector<int>& labels, std::vector<double>* dr0,
              std::vector<double>* dr1) {
  const std::size_t n = labels.size();
  if (r0.size() != n || r1.size() != n) throw ContractError("BT batch size mismatch");
  if (n == 0) throw ContractError("empty BT batch");
  if (dr0) dr0->assign(n, 0.0);
  if (dr1) dr1->assign(n, 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] != 0 && labels[k] != 1) {
      throw ContractError("BT batch contains an incomparable pair");
    }
    const bool first = labels[k] == 0;
    const double w = first ? r0[k] : r1[k];
    const double l = first ? r1[k] : r0[k];
    loss -= LogWin(w, l);
    // d(-log p)/d winner = -(1 - p); d/d loser = 1 - p.
    const double q = 1.0 - BtProbability(w, l);
    if (dr0) (*dr0)[k] = (first ? -q : q) / n;
    if (dr1) (*dr1)[k] = (first ? q : -q) / n;
  }
  return loss / n;
}

double ForcePenalty(const Vec3& f, double normalizer) {
  if (!(normalizer > 0.0)) throw RangeError("force normalizer must be positive");
  const double x = std::min(1.0, f.norm() / normalizer);
  return -x * x;
}

double CompositeReward(double r_pref, double r_force, double w) {
  return std::clamp(r_pref + w * r_force, -1.0, 1.0);
}

double ForceNormalizer95(const std::vector<Trajectory>& ts) {
  std::vector<double> mags;
  for (const Trajectory& t : ts) {
    for (const PrivilegedStep& p : t.privileged) mags.push_back(p.raw_force.norm());
  }
  if (mags.empty()) return kDefaultForceNormalizer;
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(mags.size())));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, mags.size()) - 1;
  std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
  return std::max(mags[idx], 1e-6);
}

double DepthAt(const std::vector<Trajectory>& ts, const StepRef& r) {
  StepAt(ts, r);
  return ts[r.traj].privileged[r.step].deepest_threaded_s;
}

std::vector<PreferencePair> GeneratePreferences(const std::vector<Trajectory>& ts,
                                                int n_oracle, int n_time,
                                                const OracleOptions& opt,
                                                uint64_t seed) {
  if (n_oracle < 0 || n_time < 0) throw RangeError("negative pair count");
  std::vector<StepRef> all;
  std::vector<int> multi;  // trajectories with at least two steps
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    for (int s = 0; s < ts[i].size(); ++s) all.push_back({i, s});
    if (ts[i].size() >= 2) multi.push_back(i);
  }
  std::vector<PreferencePair> out;
  out.reserve(n_oracle + n_time);
  Rng rng(SplitSeed(seed, 0x9E7));
  if (n_oracle > 0 && all.empty()) throw ContractError("no samples for oracle pairs");
  for (int k = 0; k < n_oracle; ++k) {
    PreferencePair p;
    p.source = PreferenceSource::kOracle;
    p.sample_0 = all[IndexDraw(rng, all.size())];
    p.sample_1 = all[IndexDraw(rng, all.size())];
    p.label = OraclePreference(DepthAt(ts, p.sample_0), DepthAt(ts, p.sample_1),
                               opt.margin, opt.flip_prob, rng);
    out.push_back(p);
  }
  if (n_time > 0 && multi.empty()) throw ContractError("no trajectory for time pairs");
  for (int k = 0; k < n_time; ++k) {
    PreferencePair p;
    p.source = PreferenceSource::kTimeBased;
    const int t = multi[IndexDraw(rng, multi.size())];
    const int i = static_cast<int>(IndexDraw(rng, ts[t].size()));
    const int j = static_cast<int>(IndexDraw(rng, ts[t].size()));
    p.sample_0 = {t, i};
    p.sample_1 = {t, j};
    p.label = TimePreference(i, j);
    out.push_back(p);
  }
  return out;
}

std::vector<uint8_t> SerializePreferences(const std::vector<PreferencePair>& ps) {
  ByteWriter w;
  w.PutBytes(kPrefMagic, 4);
  w.Put<uint32_t>(kPreferenceVersion);
  w.Put<uint32_t>(static_cast<uint32_t>(ps.size()));
  for (const PreferencePair& p : ps) {
    w.Put<uint32_t>(p.sample_0.traj);
    w.Put<uint32_t>(p.sample_0.step);
    w.Put<uint32_t>(p.sample_1.traj);
    w.Put<uint32_t>(p.sample_1.step);
    w.Put<int8_t>(static_cast<int8_t>(p.label));
    w.Put<uint8_t>(static_cast<uint8_t>(p.source));
  }
  return std::move(w.bytes());
}

std::vector<PreferencePair> DeserializePreferences(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.GetBytes(magic, 4);
  if (std::memcmp(magic, kPrefMagic, 4) != 0) {
    throw CorruptFileError("bad preference magic", 0);
  }
  const uint32_t version = r.Get<uint32_t>();
  if (version != kPreferenceVersion) {
    throw UnsupportedVersionError(version, kPreferenceVersion);
  }
  const uint32_t n = r.Get<uint32_t>();
  r.Require(static_cast<std::size_t>(n) * 18);
  std::vector<PreferencePair> ps(n);
  for (PreferencePair& p : ps) {
    p.sample_0.traj = static_cast<int>(r.Get<uint32_t>());
    p.sample_0.step = static_cast<int>(r.Get<uint32_t>());
    p.sample_1.traj = static_cast<int>(r.Get<uint32_t>());
    p.sample_1.step = static_cast<int>(r.Get<uint32_t>());
    const std::size_t at = r.offset();
    const int8_t label = r.Get<int8_t>();
    if (label < -1 || label > 1) throw CorruptFileError("bad preference label", at);
    p.label = label;
    const std::size_t sat = r.offset();
    const uint8_t src = r.Get<uint8_t>();
    if (src > 1) throw CorruptFileError("bad preference source", sat);
    p.source = static_cast<PreferenceSource>(src);
  }
  if (!r.AtEnd()) throw CorruptFileError("trailing bytes", r.offset());
  return ps;
}

void SavePreferences(const std::vector<PreferencePair>& ps, const std::string& path) {
  WriteFileBytes(path, SerializePreferences(ps));
}

std::vector<PreferencePair> LoadPreferences(const std::string& path) {
  return DeserializePreferences(ReadFileBytes(path));
}

nn::PointNetConfig RewardNetConfig(const std::string& prefix) {
  nn::PointNetConfig cfg = PolicyNetConfig(nn::ForceMode::kNone, prefix);
  cfg.mode = nn::NetMode::kClassification;
  cfg.fp_neighbors.clear();
  cfg.fp_widths.clear();
  cfg.extra_inputs = kActionDim;
  cfg.output_dim = 1;
  cfg.head_gain = 1.0;
  return cfg;
}

RewardModel::RewardModel(nn::PointNetConfig cfg, ActionClip clip)
    : net_(std::move(cfg)), clip_(clip) {
  if (net_.config().mode != nn::NetMode::kClassification ||
      net_.config().output_dim != 1 ||
      net_.config().extra_inputs != kActionDim) {
    throw ContractError("reward model needs a scalar classification network");
  }
}

void RewardModel::Init(Rng& rng) {
  store_ = nn::ParameterStore();
  net_.Init(store_, rng);
  lo_ = hi_ = 0.0;
}

double RewardModel::Raw(const Observation& obs, const Vec6& action) const {
  nn::Vec extra = NormalizeAction(action, clip_);
  return net_.Forward(store_, obs, Vec3::Zero(), extra, nullptr)[0];
}

double RewardModel::Normalized(const Observation& obs, const Vec6& action) const {
  if (!fitted()) throw ContractError("reward normalization is not fitted");
  const double raw = Raw(obs, action);
  return std::clamp(2.0 * (raw - lo_) / (hi_ - lo_) - 1.0, -1.0, 1.0);
}

void RewardModel::FitNormalization(const std::vector<Trajectory>& ts) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Trajectory& t : ts) {
    for (const TrajectoryStep& s : t.steps) {
      const double r = Raw(s.obs, s.action);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  if (!(lo < hi)) throw SamplingFailure("reward normalization needs distinct scores");
  lo_ = lo;
  hi_ = hi;
}

void RewardModel::SetNormalization(double lo, double hi) {
  if (!(lo < hi)) throw RangeError("normalization needs min < max");
  lo_ = lo;
  hi_ = hi;
}

void RewardModel::Save(const std::string& path) const {
  nn::ParameterStore out = store_;
  Eigen::VectorXd norm(2);
  norm << lo_, hi_;
  out.Add(kNormEntry, {2}, norm);
  nn::SaveParameters(out, path);
}

RewardModel RewardModel::Load(const std::string& path, nn::PointNetConfig cfg,
                              ActionClip clip) {
  RewardModel m(std::move(cfg), clip);
  nn::ParameterStore loaded = nn::LoadParameters(path);
  if (!loaded.Has(kNormEntry)) {
    throw ContractError("reward checkpoint lacks the normalization entry");
  }
  const Eigen::VectorXd norm = loaded.Get(kNormEntry).values;
  Rng rng(0);
  m.Init(rng);
  if (m.store_.CopyValuesFrom(loaded) != static_cast<int>(m.store_.entries().size())) {
    throw ContractError("reward checkpoint does not match the network");
  }
  if (norm[0] < norm[1]) m.SetNormalization(norm[0], norm[1]);
  return m;
}

RewardTrainResult TrainRewardModel(RewardModel& model,
                                   const std::vector<Trajectory>& ts,
                                   const std::vector<PreferencePair>& pairs,
                                   const RewardTrainConfig& cfg) {
  std::vector<PreferencePair> decidable;
  for (const PreferencePair& p : pairs) {
    if (p.label == 0 || p.label == 1) decidable.push_back(p);
  }
  if (decidable.empty()) throw SamplingFailure("no decidable preference pairs");
  if (cfg.batch < 1 || cfg.max_epochs < 0) throw RangeError("bad reward training config");
  Rng rng(SplitSeed(cfg.seed, 0x4E3));
  if (model.store().entries().empty()) model.Init(rng);
  Shuffle(decidable, rng);
  std::size_t n_held = static_cast<std::size_t>(cfg.heldout_fraction * decidable.size());
  if (decidable.size() >= 2) n_held = std::clamp<std::size_t>(n_held, 1, decidable.size() - 1);
  else n_held = 0;
  std::vector<PreferencePair> held(decidable.begin(), decidable.begin() + n_held);
  std::vector<PreferencePair> train(decidable.begin() + n_held, decidable.end());

  const nn::PointNet& net = model.net();
  auto score = [&](const StepRef& r, nn::PointNetCache* cache) {
    const TrajectoryStep& s = StepAt(ts, r);
    return net.Forward(model.store(), s.obs, Vec3::Zero(),
                       NormalizeAction(s.action, model.clip()), cache)[0];
  };
  auto evaluate = [&](const std::vector<PreferencePair>& set, double* acc) {
    if (set.empty()) {
      if (acc) *acc = 0.0;
      return 0.0;
    }
    std::vector<double> r0, r1;
    std::vector<int> y;
    int correct = 0;
    for (const PreferencePair& p : set) {
      r0.push_back(score(p.sample_0, nullptr));
      r1.push_back(score(p.sample_1, nullptr));
      y.push_back(p.label);
      correct += (r0.back() > r1.back()) == (p.label == 0);
    }
    if (acc) *acc = static_cast<double>(correct) / set.size();
    return BtLoss(r0, r1, y);
  };

  RewardTrainResult res;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Shuffle(train, rng);
    std::size_t limit = train.size();
    if (cfg.max_steps_per_epoch > 0) {
      limit = std::min(limit, static_cast<std::size_t>(cfg.max_steps_per_epoch) * cfg.batch);
    }
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < limit; start += cfg.batch) {
      const std::size_t end = std::min(limit, start + cfg.batch);
      const std::size_t n = end - start;
      std::vector<nn::PointNetCache> c0(n), c1(n);
      std::vector<double> r0(n), r1(n), d0, d1;
      std::vector<int> y(n);
      for (std::size_t k = 0; k < n; ++k) {
        const PreferencePair& p = train[start + k];
        r0[k] = score(p.sample_0, &c0[k]);
        r1[k] = score(p.sample_1, &c1[k]);
        y[k] = p.label;
      }
      epoch_loss += BtLoss(r0, r1, y, &d0, &d1);
      ++batches;
      model.store().ZeroGrad();
      for (std::size_t k = 0; k < n; ++k) {
        net.Backward(model.store(), c0[k], nn::Vec::Constant(1, d0[k]), nullptr, nullptr);
        net.Backward(model.store(), c1[k], nn::Vec::Constant(1, d1[k]), nullptr, nullptr);
      }
      model.store().AdamStep({.lr = cfg.lr});
    }
    res.train_loss.push_back(batches ? epoch_loss / batches : 0.0);
    const double hl = evaluate(held, nullptr);
    res.heldout_loss.push_back(hl);
    res.epochs = epoch + 1;
    if (hl < best - cfg.min_delta) {
      best = hl;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  evaluate(held, &res.heldout_accuracy);
  model.FitNormalization(ts);
  return res;
}

double DepthOrderAccuracy(const RewardModel& model,
                          const std::vector<Trajectory>& ts, int n_pairs,
                          double margin, uint64_t seed) {
  std::vector<StepRef> all;
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    for (int s = 0; s < ts[i].size(); ++s) all.push_back({i, s});
  }
  if (all.size() < 2 || n_pairs < 1) throw ContractError("not enough samples for accuracy");
  Rng rng(SplitSeed(seed, 0xACC));
  int correct = 0, used = 0;
  for (int tries = 0; used < n_pairs && tries < 100 * n_pairs; ++tries) {
    const StepRef a = all[IndexDraw(rng, all.size())];
    const StepRef b = all[IndexDraw(rng, all.size())];
    const double da = DepthAt(ts, a), db = DepthAt(ts, b);
    if (std::abs(da - db) < margin) continue;
    const TrajectoryStep& sa = StepAt(ts, a);
    const TrajectoryStep& sb = StepAt(ts, b);
    const bool model_a = model.Raw(sa.obs, sa.action) > model.Raw(sb.obs, sb.action);
    correct += model_a == (da > db);
    ++used;
  }
  if (used == 0) throw SamplingFailure("no pair with a decidable depth gap");
  return static_cast<double>(correct) / used;
}

void LabelDataset(std::vector<Trajectory>& ts, const RewardModel& model,
                  double w_force, double force_normalizer) {
  if (!model.fitted()) throw ContractError("reward normalization is not fitted");
  for (Trajectory& t : ts) {
    for (int i = 0; i < t.size(); ++i) {
      TrajectoryStep& s = t.steps[i];
      const double r_pref = model.Normalized(s.obs, s.action);
      const double r_force = ForcePenalty(t.privileged[i].raw_force, force_normalizer);
      s.reward = Quantize(CompositeReward(r_pref, r_force, w_force));
    }
  }
}

}  // namespace dresslab
