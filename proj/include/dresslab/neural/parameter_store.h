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

#ifndef DRESSLAB_NEURAL_PARAMETER_STORE_H_
#define DRESSLAB_NEURAL_PARAMETER_STORE_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dresslab/common.h"

namespace dresslab::nn {

struct ParamEntry {
  std::vector<int> shape;
  Eigen::VectorXd values;
  Eigen::VectorXd grads;
  Eigen::VectorXd adam_m;
  Eigen::VectorXd adam_v;
  bool frozen = false;

  int64_t size() const { return values.size(); }
};

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named flat parameter arrays with gradients and Adam moments. Iteration
// order is lexicographic by name, which fixes every reduction order.
class ParameterStore {
 public:
  using Matrix = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrix = Eigen::Map<const Eigen::MatrixXd>;

  // Adds a new entry; throws ContractError on duplicate names.
  ParamEntry& Add(const std::string& name, std::vector<int> shape,
                  const Eigen::VectorXd& values);
  bool Has(const std::string& name) const;
  ParamEntry& Get(const std::string& name);
  const ParamEntry& Get(const std::string& name) const;

  // Column-major matrix views of 2-D entries (1-D entries are columns).
  Matrix Values(const std::string& name);
  ConstMatrix Values(const std::string& name) const;
  Matrix Grads(const std::string& name);

  void ZeroGrad();
  // Freezes (or unfreezes) every entry whose name starts with `prefix`.
  void SetFrozen(std::string_view prefix, bool frozen);
  // Copies values of every entry present in both stores whose name starts
  // with `prefix`. Returns the number of entries copied.
  int CopyValuesFrom(const ParameterStore& other, std::string_view prefix = "");
  // values <- (1 - rate) * values + rate * other.values for shared names.
  void PolyakFrom(const ParameterStore& other, double rate);
  // Adds `other`'s gradients into this store's gradients (shared names).
  void AccumulateGrads(const ParameterStore& other);

  // Bias-corrected Adam over all non-frozen entries.
  void AdamStep(const AdamOptions& opt);
  int64_t adam_steps() const { return adam_steps_; }

  int64_t ParameterCount() const;
  const std::map<std::string, ParamEntry>& entries() const { return entries_; }
  std::map<std::string, ParamEntry>& entries() { return entries_; }

 private:
  std::map<std::string, ParamEntry> entries_;
  int64_t adam_steps_ = 0;
};

// Checkpoint container: magic "DLCK", u32 version, u32 entry count, then per
// entry u32 name length, name bytes, u32 rank, u32 dims, f64 values (all
// little-endian). Only values are stored.
inline constexpr uint32_t kCheckpointVersion = 1;

std::vector<uint8_t> SerializeParameters(const ParameterStore& store);
ParameterStore DeserializeParameters(const std::vector<uint8_t>& bytes);
void SaveParameters(const ParameterStore& store, const std::string& path);
ParameterStore LoadParameters(const std::string& path);

}  // namespace dresslab::nn

#endif  // DRESSLAB_NEURAL_PARAMETER_STORE_H_
