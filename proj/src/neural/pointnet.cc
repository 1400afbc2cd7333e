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

#include "dresslab/neural/pointnet.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace dresslab::nn {
namespace {

constexpr double kInterpEps = 1e-8;
constexpr double kMagnitudeScale = 0.1;

// The k nearest (squared distance, index) pairs, nearest first, ties by
// index. Only points with squared distance <= max_d2 are considered.
std::vector<std::pair<double, int>> NearestPairs(
    const Eigen::Matrix3Xd& points, const Vec3& q, int k,
    double max_d2 = std::numeric_limits<double>::infinity()) {
  std::vector<std::pair<double, int>> d;
  d.reserve(points.cols());
  for (int i = 0; i < points.cols(); ++i) {
    const double d2 = (points.col(i) - q).squaredNorm();
    if (d2 <= max_d2) d.emplace_back(d2, i);
  }
  const std::size_t n = std::min<std::size_t>(k, d.size());
  std::partial_sort(d.begin(), d.begin() + n, d.end());
  d.resize(n);
  return d;
}

}  // namespace

const char* ForceModeName(ForceMode mode) {
  switch (mode) {
    case ForceMode::kNone:
      return "none";
    case ForceMode::kFilm:
      return "film";
    case ForceMode::kConcatMagnitude:
      return "concat";
  }
  return "?";
}

void PointNetConfig::Validate() const {
  const std::size_t n_sa = sa_radii.size();
  if (n_sa == 0 || sa_ratios.size() != n_sa || sa_widths.size() != n_sa) {
    throw ContractError("SA radii, ratios and widths must have equal, nonzero length");
  }
  for (std::size_t i = 0; i < n_sa; ++i) {
    if (!(sa_radii[i] > 0.0)) throw RangeError("SA radius must be positive");
    if (!(sa_ratios[i] > 0.0 && sa_ratios[i] <= 1.0)) {
      throw RangeError("SA ratio must lie in (0, 1]");
    }
    if (sa_widths[i] < 1) throw RangeError("SA width must be positive");
  }
  if (nsample < 1) throw RangeError("nsample must be positive");
  if (global_width < 1 || output_dim < 1 || extra_inputs < 0) {
    throw RangeError("bad global/output/extra width");
  }
  if (!(global_position_scale > 0.0)) {
    throw RangeError("global_position_scale must be positive");
  }
  for (int w : head_hidden) {
    if (w < 1) throw RangeError("head width must be positive");
  }
  if (mode == NetMode::kSegmentation) {
    if (fp_neighbors.size() != n_sa + 1 || fp_widths.size() != n_sa + 1) {
      throw ContractError(
          "segmentation mode needs one FP layer per SA layer plus one from the "
          "global feature");
    }
    for (std::size_t i = 0; i < fp_neighbors.size(); ++i) {
      if (fp_neighbors[i] < 1 || fp_widths[i] < 1) {
        throw RangeError("FP neighbors and widths must be positive");
      }
    }
    if (force_mode == ForceMode::kFilm && film_hidden < 1) {
      throw RangeError("film_hidden must be positive");
    }
  } else if (force_mode == ForceMode::kFilm) {
    throw ContractError("FiLM conditioning requires segmentation mode");
  }
}

int PointNetConfig::InputChannels() const {
  return force_mode == ForceMode::kConcatMagnitude ? 4 : 3;
}

int PointNetConfig::LatentWidth() const {
  return mode == NetMode::kSegmentation ? fp_widths.back() : global_width;
}

std::vector<int> BallQuery(const Eigen::Matrix3Xd& points, const Vec3& center,
                           double radius, int cap) {
  if (points.cols() == 0) throw ContractError("ball query on an empty set");
  std::vector<int> out;
  out.reserve(cap);
  for (const auto& [d2, i] : NearestPairs(points, center, cap, radius * radius)) {
    out.push_back(i);
  }
  if (out.empty()) out.push_back(NearestPairs(points, center, 1).front().second);
  while (static_cast<int>(out.size()) < cap) out.push_back(out.front());
  return out;
}

std::vector<int> NearestK(const Eigen::Matrix3Xd& points, const Vec3& query,
                          int k) {
  auto nearest = NearestPairs(points, query, k);
  std::vector<int> out(nearest.size());
  for (std::size_t i = 0; i < nearest.size(); ++i) out[i] = nearest[i].second;
  return out;
}

std::vector<int> FarthestPointSample(const Eigen::Matrix3Xd& points,
                                     double ratio) {
  const int n = static_cast<int>(points.cols());
  std::vector<int> out;
  if (ratio >= 1.0) {
    out.resize(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  const int m = std::max(1, static_cast<int>(std::ceil(ratio * n)));
  const Vec3 centroid = points.rowwise().mean();
  out.push_back(NearestK(points, centroid, 1).front());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(out.size()) < m) {
    const Vec3 last = points.col(out.back());
    int best = 0;
    for (int i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (points.col(i) - last).squaredNorm());
      if (dist[i] > dist[best]) best = i;
    }
    out.push_back(best);
  }
  return out;
}

PointNet::PointNet(PointNetConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.Validate();
}

std::string PointNet::Name(const std::string& part) const {
  return cfg_.prefix + "/" + part;
}

MlpSpec PointNet::SaSpec(int layer) const {
  const int in = layer == 0 ? cfg_.InputChannels() : cfg_.sa_widths[layer - 1];
  return {Name("sa" + std::to_string(layer)), {3 + in, cfg_.sa_widths[layer]},
          true};
}

MlpSpec PointNet::FpSpec(int layer) const {
  const int n_sa = static_cast<int>(cfg_.sa_radii.size());
  const int target_level = n_sa - layer;
  const int src = layer == 0 ? cfg_.global_width : cfg_.fp_widths[layer - 1];
  const int skip = target_level == 0 ? cfg_.InputChannels()
                                     : cfg_.sa_widths[target_level - 1];
  return {Name("fp" + std::to_string(layer)), {src + skip, cfg_.fp_widths[layer]},
          true};
}

FilmSpec PointNet::FilmSpecFor(int layer) const {
  return {Name("film" + std::to_string(layer)), cfg_.fp_widths[layer],
          cfg_.film_hidden, 0.1};
}

MlpSpec PointNet::HeadSpec() const {
  MlpSpec spec{Name("head"), {cfg_.LatentWidth() + cfg_.extra_inputs}, false,
               cfg_.head_gain};
  for (int w : cfg_.head_hidden) spec.widths.push_back(w);
  spec.widths.push_back(cfg_.output_dim);
  return spec;
}

std::vector<std::string> PointNet::EncoderPrefixes() const {
  return {Name("sa"), Name("global"), Name("fp")};
}

void PointNet::Init(ParameterStore& store, Rng& rng) const {
  const int n_sa = static_cast<int>(cfg_.sa_radii.size());
  for (int l = 0; l < n_sa; ++l) AddMlp(store, SaSpec(l), rng);
  AddLinear(store, Name("global"), cfg_.sa_widths.back() + 3, cfg_.global_width,
            rng);
  if (cfg_.mode == NetMode::kSegmentation) {
    for (int i = 0; i <= n_sa; ++i) {
      AddMlp(store, FpSpec(i), rng);
      if (cfg_.force_mode == ForceMode::kFilm) AddFilm(store, FilmSpecFor(i), rng);
    }
  }
  AddMlp(store, HeadSpec(), rng);
}

Mat PointNet::InputFeatures(const Observation& obs, const Vec3& force,
                            int ee) const {
  Mat x = Mat::Zero(cfg_.InputChannels(), obs.size());
  for (int i = 0; i < obs.size(); ++i) {
    x(static_cast<int>(obs.classes[i]), i) = 1.0;
  }
  if (cfg_.force_mode == ForceMode::kConcatMagnitude) {
    x(3, ee) = kMagnitudeScale * force.norm();
  }
  return x;
}

Vec PointNet::Forward(const ParameterStore& store, const Observation& obs,
                      const Vec3& force, const Vec& extra,
                      PointNetCache* cache) const {
  obs.Validate();
  if (extra.size() != cfg_.extra_inputs) {
    throw ContractError("expected " + std::to_string(cfg_.extra_inputs) +
                        " extra inputs, got " + std::to_string(extra.size()));
  }
  PointNetCache local;
  PointNetCache& c = cache ? *cache : local;
  const int n_sa = static_cast<int>(cfg_.sa_radii.size());
  c.ee = obs.EndEffectorIndex();
  c.force = force;

  c.level_xyz.assign(n_sa + 1, Eigen::Matrix3Xd());
  c.level_features.assign(n_sa + 1, Mat());
  c.level_xyz[0].resize(3, obs.size());
  for (int i = 0; i < obs.size(); ++i) c.level_xyz[0].col(i) = obs.positions[i];
  c.level_features[0] = InputFeatures(obs, force, c.ee);

  // Set abstraction.
  c.sa.assign(n_sa, SaCache());
  const int k = cfg_.nsample;
  for (int l = 0; l < n_sa; ++l) {
    SaCache& s = c.sa[l];
    const Eigen::Matrix3Xd& prev_xyz = c.level_xyz[l];
    const Mat& prev_f = c.level_features[l];
    s.centers = FarthestPointSample(prev_xyz, cfg_.sa_ratios[l]);
    const int m = static_cast<int>(s.centers.size());
    Eigen::Matrix3Xd xyz(3, m);
    for (int j = 0; j < m; ++j) xyz.col(j) = prev_xyz.col(s.centers[j]);
    s.neighbors.resize(static_cast<std::size_t>(m) * k);
    s.grouped.resize(3 + prev_f.rows(), static_cast<int64_t>(m) * k);
    const double inv_r = 1.0 / cfg_.sa_radii[l];
    for (int j = 0; j < m; ++j) {
      auto nb = BallQuery(prev_xyz, xyz.col(j), cfg_.sa_radii[l], k);
      for (int q = 0; q < k; ++q) {
        const int col = j * k + q;
        s.neighbors[col] = nb[q];
        s.grouped.col(col).head<3>() =
            (prev_xyz.col(nb[q]) - xyz.col(j)) * inv_r;
        s.grouped.col(col).tail(prev_f.rows()) = prev_f.col(nb[q]);
      }
    }
    Mat h = MlpForward(store, SaSpec(l), s.grouped, &s.mlp);
    c.level_features[l + 1] = GroupMaxForward(h, k, &s.argmax);
    c.level_xyz[l + 1] = std::move(xyz);
  }

  // Global feature.
  const Eigen::Matrix3Xd& top_xyz = c.level_xyz[n_sa];
  const Mat& top_f = c.level_features[n_sa];
  const Vec3 ee_xyz = c.level_xyz[0].col(c.ee);
  c.global_in.resize(top_f.rows() + 3, top_f.cols());
  c.global_in.topRows(top_f.rows()) = top_f;
  c.global_in.bottomRows(3) =
      (top_xyz.colwise() - ee_xyz) / cfg_.global_position_scale;
  c.global_pre = LinearForward(store, Name("global"), c.global_in);
  Mat act = c.global_pre.cwiseMax(0.0);
  c.global = GroupMaxForward(act, static_cast<int>(act.cols()),
                             &c.global_argmax)
                 .col(0);

  Vec latent;
  c.fp.clear();
  if (cfg_.mode == NetMode::kClassification) {
    latent = c.global;
  } else {
    // Target sets, from the end-effector point back to the top level.
    c.fp.assign(n_sa + 1, FpCache());
    c.fp[n_sa].targets = {c.ee};
    for (int i = n_sa; i >= 1; --i) {
      FpCache& f = c.fp[i];
      const int tl = n_sa - i;
      const Eigen::Matrix3Xd& src_xyz = c.level_xyz[tl + 1];
      std::vector<std::vector<int>> nbrs;
      std::vector<int> all;
      for (int t : f.targets) {
        nbrs.push_back(NearestK(src_xyz, c.level_xyz[tl].col(t),
                                cfg_.fp_neighbors[i]));
        all.insert(all.end(), nbrs.back().begin(), nbrs.back().end());
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      c.fp[i - 1].targets = all;
      f.src_cols.resize(f.targets.size());
      f.src_weights.resize(f.targets.size());
      for (std::size_t t = 0; t < f.targets.size(); ++t) {
        const Vec3 q = c.level_xyz[tl].col(f.targets[t]);
        double total = 0.0;
        for (int src : nbrs[t]) {
          const double w = 1.0 / ((src_xyz.col(src) - q).squaredNorm() + kInterpEps);
          f.src_cols[t].push_back(static_cast<int>(
              std::lower_bound(all.begin(), all.end(), src) - all.begin()));
          f.src_weights[t].push_back(w);
          total += w;
        }
        for (double& w : f.src_weights[t]) w /= total;
      }
    }
    FpCache& f0 = c.fp[0];
    f0.src_cols.assign(f0.targets.size(), std::vector<int>{0});
    f0.src_weights.assign(f0.targets.size(), std::vector<double>{1.0});

    for (int i = 0; i <= n_sa; ++i) {
      FpCache& f = c.fp[i];
      f.skip_level = n_sa - i;
      const Mat src = i == 0 ? Mat(c.global) : c.fp[i - 1].out;
      const Mat& skip = c.level_features[f.skip_level];
      const int nt = static_cast<int>(f.targets.size());
      f.input = Mat::Zero(src.rows() + skip.rows(), nt);
      for (int t = 0; t < nt; ++t) {
        for (std::size_t j = 0; j < f.src_cols[t].size(); ++j) {
          f.input.col(t).head(src.rows()) +=
              f.src_weights[t][j] * src.col(f.src_cols[t][j]);
        }
        f.input.col(t).tail(skip.rows()) = skip.col(f.targets[t]);
      }
      Mat out = MlpForward(store, FpSpec(i), f.input, &f.mlp);
      if (cfg_.force_mode == ForceMode::kFilm) {
        out = FilmForward(store, FilmSpecFor(i), out, force, &f.film);
      }
      f.out = std::move(out);
    }
    latent = c.fp[n_sa].out.col(0);
  }

  c.head_in.resize(latent.size() + extra.size());
  c.head_in << latent, extra;
  return MlpForward(store, HeadSpec(), c.head_in, &c.head).col(0);
}

Vec PointNet::Latent(const PointNetCache& cache) const {
  return cache.head_in.head(cfg_.LatentWidth());
}

void PointNet::Backward(ParameterStore& store, const PointNetCache& c,
                        const Vec& dout, Vec* dextra, Vec3* dforce) const {
  const int n_sa = static_cast<int>(cfg_.sa_radii.size());
  Mat dhead = MlpBackward(store, HeadSpec(), c.head, Mat(dout));
  const int lw = cfg_.LatentWidth();
  if (dextra) *dextra = dhead.col(0).tail(cfg_.extra_inputs);
  if (dforce) dforce->setZero();

  std::vector<Mat> dlevel(n_sa + 1);
  for (int l = 1; l <= n_sa; ++l) {
    dlevel[l] = Mat::Zero(c.level_features[l].rows(), c.level_features[l].cols());
  }
  Vec dglobal = Vec::Zero(cfg_.global_width);

  if (cfg_.mode == NetMode::kClassification) {
    dglobal = dhead.col(0).head(lw);
  } else {
    Mat dfp_out = dhead.topRows(lw);
    for (int i = n_sa; i >= 0; --i) {
      const FpCache& f = c.fp[i];
      Mat d = dfp_out;
      if (cfg_.force_mode == ForceMode::kFilm) {
        Vec3 df;
        d = FilmBackward(store, FilmSpecFor(i), f.film, d, &df);
        if (dforce) *dforce += df;
      }
      Mat din = MlpBackward(store, FpSpec(i), f.mlp, d);
      const int src_rows = static_cast<int>(din.rows()) -
                           static_cast<int>(c.level_features[f.skip_level].rows());
      if (f.skip_level > 0) {
        for (std::size_t t = 0; t < f.targets.size(); ++t) {
          dlevel[f.skip_level].col(f.targets[t]) +=
              din.col(static_cast<int>(t)).tail(din.rows() - src_rows);
        }
      }
      if (i == 0) {
        dglobal += din.topRows(src_rows).rowwise().sum();
      } else {
        Mat dsrc = Mat::Zero(src_rows, c.fp[i - 1].out.cols());
        for (std::size_t t = 0; t < f.targets.size(); ++t) {
          for (std::size_t j = 0; j < f.src_cols[t].size(); ++j) {
            dsrc.col(f.src_cols[t][j]) +=
                f.src_weights[t][j] * din.col(static_cast<int>(t)).head(src_rows);
          }
        }
        dfp_out = std::move(dsrc);
      }
    }
  }

  // Global feature.
  Mat dact = GroupMaxBackward(Mat(dglobal), c.global_argmax,
                              static_cast<int>(c.global_pre.cols()));
  dact = (c.global_pre.array() > 0.0).select(dact, 0.0);
  Mat dgin = LinearBackward(store, Name("global"), c.global_in, dact);
  dlevel[n_sa] += dgin.topRows(dlevel[n_sa].rows());

  // Set abstraction, top down.
  const int k = cfg_.nsample;
  for (int l = n_sa - 1; l >= 0; --l) {
    const SaCache& s = c.sa[l];
    Mat dh = GroupMaxBackward(dlevel[l + 1], s.argmax, k);
    Mat dg = MlpBackward(store, SaSpec(l), s.mlp, dh);
    if (l == 0) continue;
    const int fr = static_cast<int>(dlevel[l].rows());
    for (int col = 0; col < dg.cols(); ++col) {
      dlevel[l].col(s.neighbors[col]) += dg.col(col).tail(fr);
    }
  }
}

}  // namespace dresslab::nn
