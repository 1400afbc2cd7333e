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

#include "dresslab/neural/gradient_check.h"

#include <algorithm>
#include <cmath>

namespace dresslab::nn {

double RelativeError(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

void Merge(GradCheckResult& into, const GradCheckResult& other) {
  into.checked += other.checked;
  if (other.max_rel_error > into.max_rel_error) {
    into.max_rel_error = other.max_rel_error;
    into.worst = other.worst;
  }
}

GradCheckResult CheckParameterGradients(ParameterStore& store,
                                        const std::function<double()>& loss,
                                        double h, const std::string& prefix) {
  GradCheckResult r;
  for (auto& [name, e] : store.entries()) {
    if (!name.starts_with(prefix)) continue;
    for (int64_t i = 0; i < e.size(); ++i) {
      const double w = e.values[i];
      e.values[i] = w + h;
      const double up = loss();
      e.values[i] = w - h;
      const double down = loss();
      e.values[i] = w;
      const double err = RelativeError(e.grads[i], (up - down) / (2.0 * h));
      ++r.checked;
      if (err > r.max_rel_error) {
        r.max_rel_error = err;
        r.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return r;
}

GradCheckResult CheckVectorGradient(Eigen::VectorXd& x,
                                    const Eigen::VectorXd& analytic,
                                    const std::function<double()>& loss,
                                    double h) {
  GradCheckResult r;
  for (int64_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    x[i] = v + h;
    const double up = loss();
    x[i] = v - h;
    const double down = loss();
    x[i] = v;
    const double err = RelativeError(analytic[i], (up - down) / (2.0 * h));
    ++r.checked;
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst = "x[" + std::to_string(i) + "]";
    }
  }
  return r;
}

}  // namespace dresslab::nn
