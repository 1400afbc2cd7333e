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

#include "dresslab/neural/parameter_store.h"

#include <cmath>
#include <fstream>
#include <iterator>

#include "dresslab/binary_io.h"

namespace dresslab {

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

namespace nn {
namespace {

constexpr char kMagic[4] = {'D', 'L', 'C', 'K'};

std::pair<int, int> MatrixShape(const ParamEntry& e) {
  if (e.shape.size() == 1) return {e.shape[0], 1};
  if (e.shape.size() == 2) return {e.shape[0], e.shape[1]};
  return {static_cast<int>(e.values.size()), 1};
}

}  // namespace

ParamEntry& ParameterStore::Add(const std::string& name, std::vector<int> shape,
                                const Eigen::VectorXd& values) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  if (n != values.size()) {
    throw ContractError("parameter '" + name + "': shape/value size mismatch");
  }
  auto [it, inserted] = entries_.try_emplace(name);
  if (!inserted) throw ContractError("duplicate parameter '" + name + "'");
  ParamEntry& e = it->second;
  e.shape = std::move(shape);
  e.values = values;
  e.grads = Eigen::VectorXd::Zero(n);
  e.adam_m = Eigen::VectorXd::Zero(n);
  e.adam_v = Eigen::VectorXd::Zero(n);
  return e;
}

bool ParameterStore::Has(const std::string& name) const {
  return entries_.count(name) > 0;
}

ParamEntry& ParameterStore::Get(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("no parameter '" + name + "'");
  return it->second;
}

const ParamEntry& ParameterStore::Get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("no parameter '" + name + "'");
  return it->second;
}

ParameterStore::Matrix ParameterStore::Values(const std::string& name) {
  ParamEntry& e = Get(name);
  auto [r, c] = MatrixShape(e);
  return Matrix(e.values.data(), r, c);
}

ParameterStore::ConstMatrix ParameterStore::Values(const std::string& name) const {
  const ParamEntry& e = Get(name);
  auto [r, c] = MatrixShape(e);
  return ConstMatrix(e.values.data(), r, c);
}

ParameterStore::Matrix ParameterStore::Grads(const std::string& name) {
  ParamEntry& e = Get(name);
  auto [r, c] = MatrixShape(e);
  return Matrix(e.grads.data(), r, c);
}

void ParameterStore::ZeroGrad() {
  for (auto& [name, e] : entries_) e.grads.setZero();
}

void ParameterStore::SetFrozen(std::string_view prefix, bool frozen) {
  for (auto& [name, e] : entries_) {
    if (name.starts_with(prefix)) e.frozen = frozen;
  }
}

int ParameterStore::CopyValuesFrom(const ParameterStore& other,
                                   std::string_view prefix) {
  int copied = 0;
  for (auto& [name, e] : entries_) {
    if (!name.starts_with(prefix)) continue;
    auto it = other.entries_.find(name);
    if (it == other.entries_.end()) continue;
    if (it->second.shape != e.shape) {
      throw ContractError("shape mismatch copying '" + name + "'");
    }
    e.values = it->second.values;
    ++copied;
  }
  return copied;
}

void ParameterStore::PolyakFrom(const ParameterStore& other, double rate) {
  for (auto& [name, e] : entries_) {
    auto it = other.entries_.find(name);
    if (it == other.entries_.end()) continue;
    e.values = (1.0 - rate) * e.values + rate * it->second.values;
  }
}

void ParameterStore::AccumulateGrads(const ParameterStore& other) {
  for (auto& [name, e] : entries_) {
    auto it = other.entries_.find(name);
    if (it != other.entries_.end()) e.grads += it->second.grads;
  }
}

void ParameterStore::AdamStep(const AdamOptions& opt) {
  ++adam_steps_;
  const double t = static_cast<double>(adam_steps_);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (auto& [name, e] : entries_) {
    if (e.frozen) continue;
    e.adam_m = opt.beta1 * e.adam_m + (1.0 - opt.beta1) * e.grads;
    e.adam_v = opt.beta2 * e.adam_v +
               (1.0 - opt.beta2) * e.grads.cwiseProduct(e.grads);
    e.values.array() -= opt.lr * (e.adam_m.array() / c1) /
                        ((e.adam_v.array() / c2).sqrt() + opt.eps);
  }
}

int64_t ParameterStore::ParameterCount() const {
  int64_t n = 0;
  for (const auto& [name, e] : entries_) n += e.size();
  return n;
}

std::vector<uint8_t> SerializeParameters(const ParameterStore& store) {
  ByteWriter w;
  w.PutBytes(kMagic, 4);
  w.Put<uint32_t>(kCheckpointVersion);
  w.Put<uint32_t>(static_cast<uint32_t>(store.entries().size()));
  for (const auto& [name, e] : store.entries()) {
    w.Put<uint32_t>(static_cast<uint32_t>(name.size()));
    w.PutBytes(name.data(), name.size());
    w.Put<uint32_t>(static_cast<uint32_t>(e.shape.size()));
    for (int d : e.shape) w.Put<uint32_t>(static_cast<uint32_t>(d));
    w.PutBytes(e.values.data(), sizeof(double) * e.values.size());
  }
  return std::move(w.bytes());
}

ParameterStore DeserializeParameters(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.GetBytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CorruptFileError("bad checkpoint magic", 0);
  }
  uint32_t version = r.Get<uint32_t>();
  if (version != kCheckpointVersion) {
    throw UnsupportedVersionError(version, kCheckpointVersion);
  }
  uint32_t count = r.Get<uint32_t>();
  ParameterStore store;
  for (uint32_t k = 0; k < count; ++k) {
    uint32_t len = r.Get<uint32_t>();
    std::string name(len, '\0');
    r.GetBytes(name.data(), len);
    uint32_t rank = r.Get<uint32_t>();
    if (rank > 8) throw CorruptFileError("implausible tensor rank", r.offset());
    std::vector<int> shape(rank);
    int64_t n = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<int>(r.Get<uint32_t>());
      n *= shape[d];
    }
    r.Require(sizeof(double) * static_cast<std::size_t>(n));
    Eigen::VectorXd values(n);
    r.GetBytes(values.data(), sizeof(double) * n);
    store.Add(name, std::move(shape), values);
  }
  if (!r.AtEnd()) throw CorruptFileError("trailing bytes", r.offset());
  return store;
}

void SaveParameters(const ParameterStore& store, const std::string& path) {
  WriteFileBytes(path, SerializeParameters(store));
}

ParameterStore LoadParameters(const std::string& path) {
  return DeserializeParameters(ReadFileBytes(path));
}

}  // namespace nn
}  // namespace dresslab
