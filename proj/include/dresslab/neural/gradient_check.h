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

// Centered finite-difference verification of hand-written gradients.

#ifndef DRESSLAB_NEURAL_GRADIENT_CHECK_H_
#define DRESSLAB_NEURAL_GRADIENT_CHECK_H_

#include <functional>
#include <string>

#include <Eigen/Core>

#include "dresslab/neural/parameter_store.h"

namespace dresslab::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  int checked = 0;
  std::string worst;  // "<entry>[<index>]" of the worst coordinate
};

// |a - b| / max(|a|, |b|, floor). The floor keeps coordinates whose true
// gradient is ~0 from dominating through rounding noise.
double RelativeError(double analytic, double numeric, double floor = 1e-5);

// Compares store.grads (already filled by the caller's backward pass)
// against (L(w + h) - L(w - h)) / 2h for every coordinate of every entry
// whose name starts with `prefix`. `loss` must re-run the forward pass on
// the store's current values.
GradCheckResult CheckParameterGradients(ParameterStore& store,
                                        const std::function<double()>& loss,
                                        double h = 1e-5,
                                        const std::string& prefix = "");

// Same check for a free vector argument.
GradCheckResult CheckVectorGradient(
    Eigen::VectorXd& x, const Eigen::VectorXd& analytic,
    const std::function<double()>& loss, double h = 1e-5);

void Merge(GradCheckResult& into, const GradCheckResult& other);

}  // namespace dresslab::nn

#endif  // DRESSLAB_NEURAL_GRADIENT_CHECK_H_
