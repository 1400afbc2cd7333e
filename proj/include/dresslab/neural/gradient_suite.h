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

// Randomized finite-difference checks for each differentiable block. Each
// function draws `instances` random problems from `seed` and returns the
// worst relative error over all of them.

#ifndef DRESSLAB_NEURAL_GRADIENT_SUITE_H_
#define DRESSLAB_NEURAL_GRADIENT_SUITE_H_

#include <cstdint>

#include "dresslab/neural/gradient_check.h"
#include "dresslab/neural/pointnet.h"

namespace dresslab::nn {

GradCheckResult GradSuiteMlp(int instances, uint64_t seed);
GradCheckResult GradSuiteMaxPool(int instances, uint64_t seed);
// Features, force and generator weights.
GradCheckResult GradSuiteFilm(int instances, uint64_t seed);
// d logp / d mean and d logp / d log_std.
GradCheckResult GradSuiteGaussian(int instances, uint64_t seed);
// Set-abstraction weights inside a classification network.
GradCheckResult GradSuiteSetAbstraction(int instances, uint64_t seed);
// Feature-propagation weights inside a segmentation network.
GradCheckResult GradSuiteFeaturePropagation(int instances, uint64_t seed);
// Every parameter of a 16-point segmentation network in the given mode,
// plus the extra-input gradient.
GradCheckResult GradSuiteFullNetwork(int instances, uint64_t seed,
                                     ForceMode mode);

// Tiny network and random cloud used by the suites.
PointNetConfig TinyConfig(NetMode mode, ForceMode force_mode);
Observation RandomCloud(int n, Rng& rng);

}  // namespace dresslab::nn

#endif  // DRESSLAB_NEURAL_GRADIENT_SUITE_H_
