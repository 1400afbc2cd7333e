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

// Hand-written forward/backward building blocks. Feature matrices are
// (channels x columns): one column per point, grouped neighbor or sample.

#ifndef DRESSLAB_NEURAL_LAYERS_H_
#define DRESSLAB_NEURAL_LAYERS_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dresslab/common.h"
#include "dresslab/neural/parameter_store.h"

namespace dresslab::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// y = W x + b with W (out x in). Uniform(+-gain*sqrt(6/in)) init, zero bias;
// `zero_init` zeroes W as well.
void AddLinear(ParameterStore& store, const std::string& name, int in, int out,
               Rng& rng, double gain = 1.0, bool zero_init = false);
Mat LinearForward(const ParameterStore& store, const std::string& name,
                  const Mat& x);
// Accumulates dW, db and returns dx.
Mat LinearBackward(ParameterStore& store, const std::string& name, const Mat& x,
                   const Mat& dy);

struct MlpSpec {
  std::string name;
  std::vector<int> widths;  // input, hidden..., output
  bool final_relu = true;
  double final_gain = 1.0;

  int in() const { return widths.front(); }
  int out() const { return widths.back(); }
};

struct MlpCache {
  std::vector<Mat> inputs;  // input to every linear layer
  std::vector<Mat> pre;     // pre-activations
};

void AddMlp(ParameterStore& store, const MlpSpec& spec, Rng& rng);
Mat MlpForward(const ParameterStore& store, const MlpSpec& spec, const Mat& x,
               MlpCache* cache);
Mat MlpBackward(ParameterStore& store, const MlpSpec& spec,
                const MlpCache& cache, const Mat& dy);

// Max over consecutive column groups of width `group`. On ties the lowest
// column index wins, and only that column receives gradient.
Mat GroupMaxForward(const Mat& x, int group, Eigen::MatrixXi* argmax);
Mat GroupMaxBackward(const Mat& dy, const Eigen::MatrixXi& argmax, int group);

// Feature-wise affine modulation conditioned on a force vector:
//   [delta_gamma; beta] = W2 relu(W1 (scale * f) + b1) + b2
//   out = (1 + delta_gamma) .* features + beta   (broadcast over columns)
// W2 and b2 start at zero, so a fresh block is the identity map.
struct FilmSpec {
  std::string name;
  int feature_dim = 0;
  int hidden = 32;
  double input_scale = 0.1;  // 1/N
};

struct FilmCache {
  Mat features;
  MlpCache mlp;
  Vec gamma;
  Vec beta;
};

void AddFilm(ParameterStore& store, const FilmSpec& spec, Rng& rng);
// Throws ContractError when features.rows() != spec.feature_dim.
Mat FilmForward(const ParameterStore& store, const FilmSpec& spec,
                const Mat& features, const Vec3& force, FilmCache* cache);
// Accumulates generator grads; returns d features. `dforce` may be null.
Mat FilmBackward(ParameterStore& store, const FilmSpec& spec,
                 const FilmCache& cache, const Mat& dy, Vec3* dforce);

// Diagonal Gaussian over actions.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

double GaussianLogProb(const Vec& mean, const Vec& log_std, const Vec& action);
// d logp / d mean and d logp / d log_std.
void GaussianLogProbGrad(const Vec& mean, const Vec& log_std, const Vec& action,
                         Vec* dmean, Vec* dlog_std);
Vec GaussianSample(const Vec& mean, const Vec& log_std, Rng& rng);

}  // namespace dresslab::nn

#endif  // DRESSLAB_NEURAL_LAYERS_H_
