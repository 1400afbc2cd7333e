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

#include "dresslab/neural/gradient_suite.h"

namespace dresslab::nn {
namespace {

Mat RandomMat(int r, int c, Rng& rng, double scale = 1.0) {
  Mat m(r, c);
  for (int64_t i = 0; i < m.size(); ++i) m.data()[i] = scale * NormalDraw(rng);
  return m;
}

Vec RandomVec(int n, Rng& rng, double scale = 1.0) {
  return RandomMat(n, 1, rng, scale).col(0);
}

Vec3 RandomForce(Rng& rng) {
  return Vec3(NormalDraw(rng), NormalDraw(rng), NormalDraw(rng)) * 5.0;
}

// Gives every parameter a nonzero random value so that zero-initialized
// blocks (FiLM output layers, biases) are exercised too.
void Randomize(ParameterStore& store, Rng& rng, double scale) {
  for (auto& [name, e] : store.entries()) {
    for (int64_t i = 0; i < e.size(); ++i) e.values[i] = scale * NormalDraw(rng);
  }
}

GradCheckResult CheckNetwork(const PointNet& net, int instances, Rng& rng,
                             const std::string& prefix, bool check_extra) {
  GradCheckResult total;
  for (int t = 0; t < instances; ++t) {
    ParameterStore store;
    net.Init(store, rng);
    Randomize(store, rng, 0.5);
    Observation obs = RandomCloud(16, rng);
    Vec3 force = RandomForce(rng);
    Vec extra = RandomVec(net.config().extra_inputs, rng);
    Vec c = RandomVec(net.config().output_dim, rng);
    auto loss = [&] { return c.dot(net.Forward(store, obs, force, extra, nullptr)); };
    PointNetCache cache;
    net.Forward(store, obs, force, extra, &cache);
    store.ZeroGrad();
    Vec dextra;
    net.Backward(store, cache, c, &dextra, nullptr);
    Merge(total, CheckParameterGradients(store, loss, 1e-5, prefix));
    if (check_extra && extra.size() > 0) {
      Merge(total, CheckVectorGradient(extra, dextra, loss));
    }
  }
  return total;
}

}  // namespace

PointNetConfig TinyConfig(NetMode mode, ForceMode force_mode) {
  PointNetConfig cfg;
  cfg.prefix = "tiny";
  cfg.mode = mode;
  cfg.force_mode = force_mode;
  cfg.nsample = 4;
  cfg.sa_widths = {4, 5};
  cfg.global_width = 6;
  cfg.fp_widths = {5, 4, 4};
  cfg.head_hidden = {5};
  cfg.output_dim = 3;
  cfg.extra_inputs = 2;
  cfg.film_hidden = 3;
  return cfg;
}

Observation RandomCloud(int n, Rng& rng) {
  Observation obs;
  for (int i = 0; i < n; ++i) {
    obs.positions.emplace_back(0.15 * UniformDraw(rng), 0.15 * UniformDraw(rng),
                               0.15 * UniformDraw(rng));
    PointClass c = i == n - 1      ? PointClass::kEndEffector
                   : i < n / 2     ? PointClass::kGarment
                                   : PointClass::kArm;
    obs.classes.push_back(c);
  }
  return obs;
}

GradCheckResult GradSuiteMlp(int instances, uint64_t seed) {
  Rng rng(seed);
  GradCheckResult total;
  for (int t = 0; t < instances; ++t) {
    MlpSpec spec{"mlp", {4, 6, 5, 3}, t % 2 == 0};
    ParameterStore store;
    AddMlp(store, spec, rng);
    Randomize(store, rng, 0.7);
    Mat x = RandomMat(4, 5, rng);
    Mat c = RandomMat(3, 5, rng);
    auto loss = [&] { return (c.array() * MlpForward(store, spec, x, nullptr).array()).sum(); };
    MlpCache cache;
    MlpForward(store, spec, x, &cache);
    store.ZeroGrad();
    Mat dx = MlpBackward(store, spec, cache, c);
    Merge(total, CheckParameterGradients(store, loss));
    Vec xv = Eigen::Map<Vec>(x.data(), x.size());
    Vec dxv = Eigen::Map<Vec>(dx.data(), dx.size());
    auto loss_x = [&] {
      Mat xm = Eigen::Map<Mat>(xv.data(), 4, 5);
      return (c.array() * MlpForward(store, spec, xm, nullptr).array()).sum();
    };
    Merge(total, CheckVectorGradient(xv, dxv, loss_x));
  }
  return total;
}

GradCheckResult GradSuiteMaxPool(int instances, uint64_t seed) {
  Rng rng(seed);
  GradCheckResult total;
  for (int t = 0; t < instances; ++t) {
    const int group = 2 + t % 4;
    Mat x = RandomMat(3, 4 * group, rng);
    Mat c = RandomMat(3, 4, rng);
    Eigen::MatrixXi argmax;
    GroupMaxForward(x, group, &argmax);
    Mat dx = GroupMaxBackward(c, argmax, group);
    Vec xv = Eigen::Map<Vec>(x.data(), x.size());
    Vec dxv = Eigen::Map<Vec>(dx.data(), dx.size());
    auto loss = [&] {
      Mat xm = Eigen::Map<Mat>(xv.data(), 3, 4 * group);
      return (c.array() * GroupMaxForward(xm, group, nullptr).array()).sum();
    };
    Merge(total, CheckVectorGradient(xv, dxv, loss));
  }
  return total;
}

GradCheckResult GradSuiteFilm(int instances, uint64_t seed) {
  Rng rng(seed);
  GradCheckResult total;
  for (int t = 0; t < instances; ++t) {
    FilmSpec spec{"film", 5, 4, 0.1};
    ParameterStore store;
    AddFilm(store, spec, rng);
    Randomize(store, rng, 0.8);
    Mat f = RandomMat(5, 7, rng);
    Vec force = RandomForce(rng);
    Mat c = RandomMat(5, 7, rng);
    auto run = [&](const Mat& feat) {
      return (c.array() * FilmForward(store, spec, feat, Vec3(force), nullptr).array()).sum();
    };
    FilmCache cache;
    FilmForward(store, spec, f, Vec3(force), &cache);
    store.ZeroGrad();
    Vec3 dforce;
    Mat df = FilmBackward(store, spec, cache, c, &dforce);
    Merge(total, CheckParameterGradients(store, [&] { return run(f); }));
    Vec fv = Eigen::Map<Vec>(f.data(), f.size());
    Vec dfv = Eigen::Map<Vec>(df.data(), df.size());
    Merge(total, CheckVectorGradient(fv, dfv, [&] {
            return run(Eigen::Map<Mat>(fv.data(), 5, 7));
          }));
    Merge(total, CheckVectorGradient(force, Vec(dforce), [&] { return run(f); }));
  }
  return total;
}

GradCheckResult GradSuiteGaussian(int instances, uint64_t seed) {
  Rng rng(seed);
  GradCheckResult total;
  for (int t = 0; t < instances; ++t) {
    Vec mean = RandomVec(6, rng);
    Vec log_std = RandomVec(6, rng, 0.5);
    Vec action = RandomVec(6, rng);
    Vec dmean, dlog_std;
    GaussianLogProbGrad(mean, log_std, action, &dmean, &dlog_std);
    auto loss = [&] { return GaussianLogProb(mean, log_std, action); };
    Merge(total, CheckVectorGradient(mean, dmean, loss));
    Merge(total, CheckVectorGradient(log_std, dlog_std, loss));
  }
  return total;
}

GradCheckResult GradSuiteSetAbstraction(int instances, uint64_t seed) {
  Rng rng(seed);
  PointNet net(TinyConfig(NetMode::kClassification, ForceMode::kNone));
  GradCheckResult r = CheckNetwork(net, instances, rng, "tiny/sa", false);
  Merge(r, CheckNetwork(net, instances, rng, "tiny/global", false));
  return r;
}

GradCheckResult GradSuiteFeaturePropagation(int instances, uint64_t seed) {
  Rng rng(seed);
  PointNet net(TinyConfig(NetMode::kSegmentation, ForceMode::kNone));
  return CheckNetwork(net, instances, rng, "tiny/fp", false);
}

GradCheckResult GradSuiteFullNetwork(int instances, uint64_t seed,
                                     ForceMode mode) {
  Rng rng(seed);
  PointNet net(TinyConfig(NetMode::kSegmentation, mode));
  return CheckNetwork(net, instances, rng, "", true);
}

}  // namespace dresslab::nn
