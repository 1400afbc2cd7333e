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

#include "dresslab/neural/layers.h"

#include <cmath>
#include <numbers>

namespace dresslab::nn {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::string W(const std::string& name) { return name + "/w"; }
std::string B(const std::string& name) { return name + "/b"; }

}  // namespace

void AddLinear(ParameterStore& store, const std::string& name, int in, int out,
               Rng& rng, double gain, bool zero_init) {
  Vec w(static_cast<int64_t>(in) * out);
  const double bound = gain * std::sqrt(6.0 / in);
  for (int64_t i = 0; i < w.size(); ++i) {
    w[i] = zero_init ? 0.0 : bound * (2.0 * UniformDraw(rng) - 1.0);
  }
  store.Add(W(name), {out, in}, w);
  store.Add(B(name), {out}, Vec::Zero(out));
}

Mat LinearForward(const ParameterStore& store, const std::string& name,
                  const Mat& x) {
  auto w = store.Values(W(name));
  auto b = store.Values(B(name));
  if (w.cols() != x.rows()) {
    throw ContractError("linear '" + name + "': expected " +
                        std::to_string(w.cols()) + " input channels, got " +
                        std::to_string(x.rows()));
  }
  Mat y = w * x;
  y.colwise() += b.col(0);
  return y;
}

Mat LinearBackward(ParameterStore& store, const std::string& name, const Mat& x,
                   const Mat& dy) {
  store.Grads(W(name)).noalias() += dy * x.transpose();
  store.Grads(B(name)).col(0) += dy.rowwise().sum();
  return store.Values(W(name)).transpose() * dy;
}

void AddMlp(ParameterStore& store, const MlpSpec& spec, Rng& rng) {
  const int layers = static_cast<int>(spec.widths.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    const bool last = l == layers - 1;
    AddLinear(store, spec.name + "/" + std::to_string(l), spec.widths[l],
              spec.widths[l + 1], rng, last ? spec.final_gain : 1.0);
  }
}

Mat MlpForward(const ParameterStore& store, const MlpSpec& spec, const Mat& x,
               MlpCache* cache) {
  const int layers = static_cast<int>(spec.widths.size()) - 1;
  if (cache) {
    cache->inputs.resize(layers);
    cache->pre.resize(layers);
  }
  Mat h = x;
  for (int l = 0; l < layers; ++l) {
    Mat z = LinearForward(store, spec.name + "/" + std::to_string(l), h);
    if (cache) {
      cache->inputs[l] = std::move(h);
    }
    const bool relu = l < layers - 1 || spec.final_relu;
    h = relu ? Mat(z.cwiseMax(0.0)) : z;
    if (cache) cache->pre[l] = std::move(z);
  }
  return h;
}

Mat MlpBackward(ParameterStore& store, const MlpSpec& spec,
                const MlpCache& cache, const Mat& dy) {
  const int layers = static_cast<int>(spec.widths.size()) - 1;
  Mat g = dy;
  for (int l = layers - 1; l >= 0; --l) {
    const bool relu = l < layers - 1 || spec.final_relu;
    if (relu) g = (cache.pre[l].array() > 0.0).select(g, 0.0);
    g = LinearBackward(store, spec.name + "/" + std::to_string(l),
                       cache.inputs[l], g);
  }
  return g;
}

Mat GroupMaxForward(const Mat& x, int group, Eigen::MatrixXi* argmax) {
  const int groups = static_cast<int>(x.cols()) / group;
  Mat out(x.rows(), groups);
  if (argmax) argmax->resize(x.rows(), groups);
  for (int g = 0; g < groups; ++g) {
    for (int r = 0; r < x.rows(); ++r) {
      int best = g * group;
      double v = x(r, best);
      for (int c = best + 1; c < (g + 1) * group; ++c) {
        if (x(r, c) > v) {
          v = x(r, c);
          best = c;
        }
      }
      out(r, g) = v;
      if (argmax) (*argmax)(r, g) = best;
    }
  }
  return out;
}

Mat GroupMaxBackward(const Mat& dy, const Eigen::MatrixXi& argmax, int group) {
  Mat dx = Mat::Zero(dy.rows(), dy.cols() * group);
  for (int g = 0; g < dy.cols(); ++g) {
    for (int r = 0; r < dy.rows(); ++r) dx(r, argmax(r, g)) += dy(r, g);
  }
  return dx;
}

void AddFilm(ParameterStore& store, const FilmSpec& spec, Rng& rng) {
  AddLinear(store, spec.name + "/0", 3, spec.hidden, rng);
  AddLinear(store, spec.name + "/1", spec.hidden, 2 * spec.feature_dim, rng,
            1.0, /*zero_init=*/true);
}

Mat FilmForward(const ParameterStore& store, const FilmSpec& spec,
                const Mat& features, const Vec3& force, FilmCache* cache) {
  if (features.rows() != spec.feature_dim) {
    throw ContractError("FiLM '" + spec.name + "': feature dim " +
                        std::to_string(features.rows()) + " != " +
                        std::to_string(spec.feature_dim));
  }
  MlpSpec gen{spec.name, {3, spec.hidden, 2 * spec.feature_dim}, false};
  Mat f = force * spec.input_scale;
  MlpCache local;
  Mat out = MlpForward(store, gen, f, &local);
  Vec gamma = Vec::Ones(spec.feature_dim) + out.col(0).head(spec.feature_dim);
  Vec beta = out.col(0).tail(spec.feature_dim);
  Mat y = (features.array().colwise() * gamma.array()).matrix();
  y.colwise() += beta;
  if (cache) {
    cache->features = features;
    cache->mlp = std::move(local);
    cache->gamma = gamma;
    cache->beta = beta;
  }
  return y;
}

Mat FilmBackward(ParameterStore& store, const FilmSpec& spec,
                 const FilmCache& cache, const Mat& dy, Vec3* dforce) {
  MlpSpec gen{spec.name, {3, spec.hidden, 2 * spec.feature_dim}, false};
  Mat dout(2 * spec.feature_dim, 1);
  dout.col(0).head(spec.feature_dim) =
      cache.features.cwiseProduct(dy).rowwise().sum();
  dout.col(0).tail(spec.feature_dim) = dy.rowwise().sum();
  Mat df = MlpBackward(store, gen, cache.mlp, dout);
  if (dforce) *dforce = df.col(0) * spec.input_scale;
  return (dy.array().colwise() * cache.gamma.array()).matrix();
}

double GaussianLogProb(const Vec& mean, const Vec& log_std, const Vec& action) {
  double lp = 0.0;
  for (int i = 0; i < mean.size(); ++i) {
    double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

void GaussianLogProbGrad(const Vec& mean, const Vec& log_std, const Vec& action,
                         Vec* dmean, Vec* dlog_std) {
  const int n = static_cast<int>(mean.size());
  dmean->resize(n);
  dlog_std->resize(n);
  for (int i = 0; i < n; ++i) {
    double inv = std::exp(-log_std[i]);
    double z = (action[i] - mean[i]) * inv;
    (*dmean)[i] = z * inv;
    (*dlog_std)[i] = z * z - 1.0;
  }
}

Vec GaussianSample(const Vec& mean, const Vec& log_std, Rng& rng) {
  Vec a(mean.size());
  for (int i = 0; i < mean.size(); ++i) {
    a[i] = mean[i] + std::exp(log_std[i]) * NormalDraw(rng);
  }
  return a;
}

}  // namespace dresslab::nn
