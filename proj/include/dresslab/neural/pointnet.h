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

// PointNet++-style network over a segmented point cloud.
//
// Segmentation mode:
//   SA_1 .. SA_n  ->  global (linear + relu on [features; xyz - xyz_ee], max)
//   -> FP_0 (from the global vector) -> FP_1 .. FP_n (inverse-distance kNN)
//   -> head MLP on the end-effector point's feature (+ extra inputs).
// Only the feature-propagation cone that reaches the end-effector point is
// evaluated, which yields the same head input as dense propagation.
//
// Classification mode:
//   SA_1 .. SA_n -> global -> head MLP on [global; extra inputs].
//
// Per-point input features are the one-hot class (3 channels). With
// ForceMode::kConcatMagnitude a 4th channel carries 0.1 * |force| on the
// end-effector point and 0 elsewhere. With ForceMode::kFilm every FP output
// is modulated by its own FiLM block driven by the force vector.

#ifndef DRESSLAB_NEURAL_POINTNET_H_
#define DRESSLAB_NEURAL_POINTNET_H_

#include <string>
#include <vector>

#include "dresslab/neural/layers.h"
#include "dresslab/sensing.h"

namespace dresslab::nn {

enum class NetMode { kSegmentation, kClassification };
enum class ForceMode { kNone, kFilm, kConcatMagnitude };

const char* ForceModeName(ForceMode mode);

struct PointNetConfig {
  std::string prefix = "net";
  NetMode mode = NetMode::kSegmentation;
  ForceMode force_mode = ForceMode::kNone;
  std::vector<double> sa_radii = {0.05, 0.10};
  std::vector<double> sa_ratios = {1.0, 1.0};
  // Ball-query cap; the nearest `nsample` points inside the radius are kept.
  int nsample = 16;
  std::vector<int> sa_widths = {64, 128};
  int global_width = 256;
  double global_position_scale = 0.25;  // m
  std::vector<int> fp_neighbors = {1, 3, 3};
  std::vector<int> fp_widths = {128, 128, 64};
  std::vector<int> head_hidden = {64};
  int output_dim = 12;
  int extra_inputs = 0;  // appended to the head input
  int film_hidden = 32;
  double head_gain = 0.1;

  // Throws RangeError / ContractError on inconsistent settings.
  void Validate() const;
  int InputChannels() const;
  // Width of the head input before the extra inputs.
  int LatentWidth() const;
};

struct SaCache {
  std::vector<int> centers;    // indices into the previous level
  std::vector<int> neighbors;  // nsample per center, previous-level indices
  Mat grouped;
  MlpCache mlp;
  Eigen::MatrixXi argmax;
};

struct FpCache {
  std::vector<int> targets;  // indices into the target level
  // Per target: source columns (into the previous FP output or 0 for the
  // global vector) and normalized interpolation weights.
  std::vector<std::vector<int>> src_cols;
  std::vector<std::vector<double>> src_weights;
  int skip_level = 0;
  Mat input;
  MlpCache mlp;
  FilmCache film;
  Mat out;
};

struct PointNetCache {
  std::vector<Eigen::Matrix3Xd> level_xyz;  // level 0 is the input cloud
  std::vector<Mat> level_features;          // level 0 is the input features
  std::vector<SaCache> sa;
  Mat global_in;
  Mat global_pre;
  Eigen::MatrixXi global_argmax;
  Vec global;
  std::vector<FpCache> fp;
  Vec head_in;
  MlpCache head;
  Vec3 force = Vec3::Zero();
  int ee = 0;
};

class PointNet {
 public:
  explicit PointNet(PointNetConfig cfg);

  const PointNetConfig& config() const { return cfg_; }

  // Adds all parameters under cfg.prefix.
  void Init(ParameterStore& store, Rng& rng) const;

  // `extra` must have cfg.extra_inputs entries. Throws ContractError on
  // malformed observations or dimension mismatches.
  Vec Forward(const ParameterStore& store, const Observation& obs,
              const Vec3& force, const Vec& extra, PointNetCache* cache) const;
  Vec Forward(const ParameterStore& store, const Observation& obs,
              const Vec3& force) const {
    return Forward(store, obs, force, Vec(), nullptr);
  }

  // Accumulates parameter gradients for d loss / d output. `dextra` and
  // `dforce` (FiLM path only) may be null.
  void Backward(ParameterStore& store, const PointNetCache& cache,
                const Vec& dout, Vec* dextra, Vec3* dforce) const;

  // Head input (latent feature, extra inputs excluded) from a forward cache.
  Vec Latent(const PointNetCache& cache) const;

  // Parameter-name prefixes of the perception encoder (everything except
  // FiLM blocks and the head).
  std::vector<std::string> EncoderPrefixes() const;

 private:
  std::string Name(const std::string& part) const;
  MlpSpec SaSpec(int layer) const;
  MlpSpec FpSpec(int layer) const;
  FilmSpec FilmSpecFor(int layer) const;
  MlpSpec HeadSpec() const;
  Mat InputFeatures(const Observation& obs, const Vec3& force, int ee) const;

  PointNetConfig cfg_;
};

// Neighbor search helpers, exposed for tests.

// Up to `cap` indices of `points` within `radius` of `center`, nearest first
// (ties by index), padded to exactly `cap` by repeating the first. An empty
// ball falls back to the single nearest point.
std::vector<int> BallQuery(const Eigen::Matrix3Xd& points, const Vec3& center,
                           double radius, int cap);
// The k nearest indices (ties by index); all points if fewer than k.
std::vector<int> NearestK(const Eigen::Matrix3Xd& points, const Vec3& query,
                          int k);
// ceil(ratio * n) centers by farthest-point sampling seeded at the point
// nearest the centroid; ratio 1 returns 0..n-1.
std::vector<int> FarthestPointSample(const Eigen::Matrix3Xd& points,
                                     double ratio);

}  // namespace dresslab::nn

#endif  // DRESSLAB_NEURAL_POINTNET_H_
