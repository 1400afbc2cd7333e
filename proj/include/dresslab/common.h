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

#ifndef DRESSLAB_COMMON_H_
#define DRESSLAB_COMMON_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dresslab {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Rng = std::mt19937_64;

// A value outside its documented range (joint angle, probability, ...).
class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition that is not a plain range check (shape mismatch, missing
// fit, unlabeled pair in a training batch, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Rejection sampling or training could not produce a result.
class SamplingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SplitMix64 finalizer. Used to derive independent per-episode / per-task
// seeds from a master seed so results do not depend on scheduling.
inline uint64_t MixSeed(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t SplitSeed(uint64_t master, uint64_t stream) {
  return MixSeed(master ^ MixSeed(stream + 0x632BE59BD9B4E019ULL));
}

// Standard normal draw that does not depend on the standard library's
// distribution implementation (Box-Muller over 53-bit uniforms).
inline double NormalDraw(Rng& rng) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  double u1 = ((rng() >> 11) + 0.5) * kScale;
  double u2 = ((rng() >> 11) + 0.5) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline double UniformDraw(Rng& rng) {
  return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Uniform integer in [0, n).
inline std::size_t IndexDraw(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(UniformDraw(rng) * static_cast<double>(n)) %
         n;
}

// Fisher-Yates over IndexDraw.
template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[IndexDraw(rng, i)]);
  }
}

}  // namespace dresslab

#endif  // DRESSLAB_COMMON_H_
