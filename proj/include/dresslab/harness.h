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


// Dataset collection and the evaluation grid.

#ifndef DRESSLAB_HARNESS_H_
#define DRESSLAB_HARNESS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dresslab/environment.h"

namespace dresslab {

// Episode i of a run seeded with `master` uses SplitSeed(master, i).
uint64_t EpisodeSeed(uint64_t master, uint64_t index);

// Static SOURCE episodes cycling over the four body sizes and every garment
// profile (size fastest).
std::vector<EnvConfig> SourceConfigs(int n, uint64_t master_seed);

// The five motions and two garments used for fine-tuning data.
std::vector<MotionName> FinetuneMotions();
std::vector<std::string> FinetuneGarments();

// TARGET episodes on the Medium body; episode i uses motion i % 5 and
// garment (i / 5) % 2, so the ten cells stay balanced within one episode.
std::vector<EnvConfig> TargetConfigs(int n, uint64_t master_seed);

std::vector<Trajectory> Collect(Policy& policy, const std::vector<EnvConfig>& configs);

struct EvalGrid {
  std::vector<std::string> garments;
  std::vector<MotionSpec> motions;
  std::vector<SizeClass> sizes;
  int trials = 5;

  int Cells() const;
  int Episodes() const { return Cells() * trials; }
};

// Held-out garments {narrow, short} x 14 motions x 4 sizes x 5 trials.
EvalGrid DeskGrid();
// All garment profiles x 14 motions x 4 sizes x 10 trials.
EvalGrid FullGrid();

inline constexpr int kTerminationCount = 4;

struct EvalCell {
  std::string method;
  std::string garment;
  std::string motion;
  SizeClass size = SizeClass::kMedium;
  double upper = 0.0;  // mean over trials
  double whole = 0.0;
  int trials = 0;
  std::array<int, kTerminationCount> reasons{};  // ordered as kAllTerminations
};

struct EvalReport {
  std::vector<EvalCell> cells;

  std::vector<std::string> Methods() const;  // first-appearance order
  double MeanUpper(const std::string& method) const;  // trial-weighted
  double MeanWhole(const std::string& method) const;
  std::array<int, kTerminationCount> Reasons(const std::string& method) const;
  int Episodes(const std::string& method) const;

  // One row per method: Small, Medium, Large, XLarge, Average (upper ratio).
  std::string SizeTable() const;
  std::string SizeCsv() const;
  // One row per method: one column per motion label, then Average.
  std::string MotionTable() const;
  std::string MotionCsv() const;
  // Every cell, for re-loading.
  std::string CellsCsv() const;
  static EvalReport FromCellsCsv(const std::string& text);
};

// Runs every grid cell for one policy. Cell c, trial k uses
// EpisodeSeed(seed, c * trials + k), so methods share initial conditions.
EvalReport EvaluateGrid(const std::string& method, Policy& policy,
                        const EvalGrid& grid, uint64_t seed);

// Appends the cells of `other`.
void MergeReports(EvalReport& into, const EvalReport& other);

}  // namespace dresslab

#endif  // DRESSLAB_HARNESS_H_
