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


// Deterministic 5x5 gridworld with a goal in the far corner, a mixed
// random/goal-directed offline dataset, and value iteration as the oracle.

#ifndef DRESSLAB_TESTS_SUPPORT_GRIDWORLD_H_
#define DRESSLAB_TESTS_SUPPORT_GRIDWORLD_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "dresslab/iql.h"

namespace dresslab::testing {

inline constexpr int kGridSide = 5;
inline constexpr int kGridStates = kGridSide * kGridSide;
inline constexpr int kGridActions = 4;  // up, down, left, right
inline constexpr int kGridGoal = kGridStates - 1;

inline int GridStep(int s, int a) {
  int x = s % kGridSide, y = s / kGridSide;
  if (a == 0) y = std::min(kGridSide - 1, y + 1);
  if (a == 1) y = std::max(0, y - 1);
  if (a == 2) x = std::max(0, x - 1);
  if (a == 3) x = std::min(kGridSide - 1, x + 1);
  return y * kGridSide + x;
}

// Reward -1 per move; reaching the goal ends the episode.
inline std::vector<TabularTransition> GridDataset(uint64_t seed) {
  Rng rng(seed);
  std::vector<TabularTransition> d;
  for (int ep = 0; ep < 200; ++ep) {
    int s = static_cast<int>(IndexDraw(rng, kGridGoal));
    for (int k = 0; k < 30 && s != kGridGoal; ++k) {
      int a;
      if (UniformDraw(rng) < 0.5) {
        a = static_cast<int>(IndexDraw(rng, kGridActions));
      } else {
        const bool right_ok = s % kGridSide < kGridSide - 1;
        const bool top = s / kGridSide == kGridSide - 1;
        a = right_ok && (top || UniformDraw(rng) < 0.5) ? 3 : 0;
      }
      const int next = GridStep(s, a);
      d.push_back({s, a, -1.0, next, next == kGridGoal});
      s = next;
    }
  }
  return d;
}

struct GridOracle {
  std::vector<double> v;

  explicit GridOracle(double discount) : v(kGridStates, 0.0) {
    for (int it = 0; it < 500; ++it) {
      for (int s = 0; s < kGridGoal; ++s) {
        double best = -1e300;
        for (int a = 0; a < kGridActions; ++a) best = std::max(best, Q(s, a, discount));
        v[s] = best;
      }
    }
  }
  double Q(int s, int a, double discount) const {
    const int n = GridStep(s, a);
    return -1.0 + discount * (n == kGridGoal ? 0.0 : v[n]);
  }
  bool Optimal(int s, int a, double discount) const {
    return std::abs(Q(s, a, discount) - v[s]) < 1e-9;
  }
};

// Fraction of non-goal states where the greedy IQL action is optimal.
inline double GridAgreement(const TabularIqlResult& r, double discount) {
  const GridOracle oracle(discount);
  int ok = 0;
  for (int s = 0; s < kGridGoal; ++s) ok += oracle.Optimal(s, r.greedy[s], discount);
  return static_cast<double>(ok) / kGridGoal;
}

inline IqlHyper GridHyper() {
  IqlHyper h;
  h.lr = 0.3;
  h.batch = 64;
  h.polyak = 0.05;
  return h;
}

inline constexpr int kGridSteps = 30000;

}  // namespace dresslab::testing

#endif  // DRESSLAB_TESTS_SUPPORT_GRIDWORLD_H_
