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

#include "dresslab/trajectory.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dresslab/binary_io.h"

namespace dresslab {
namespace {

constexpr char kMagic[4] = {'D', 'R', 'S', '1'};
constexpr uint32_t kMaxPoints = 1u << 20;

void PutVec3f(ByteWriter& w, const Vec3& v) {
  for (int i = 0; i < 3; ++i) w.Put<float>(static_cast<float>(v[i]));
}
Vec3 GetVec3f(ByteReader& r) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = r.Get<float>();
  return v;
}
void PutVec3d(ByteWriter& w, const Vec3& v) {
  for (int i = 0; i < 3; ++i) w.Put<double>(v[i]);
}
Vec3 GetVec3d(ByteReader& r) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = r.Get<double>();
  return v;
}
void PutString(ByteWriter& w, const std::string& s) {
  w.Put<uint32_t>(static_cast<uint32_t>(s.size()));
  w.PutBytes(s.data(), s.size());
}
std::string GetString(ByteReader& r) {
  const std::size_t at = r.offset();
  uint32_t n = r.Get<uint32_t>();
  if (n > 4096) throw CorruptFileError("implausible string length", at);
  std::string s(n, '\0');
  r.GetBytes(s.data(), n);
  return s;
}

}  // namespace

std::string_view DomainName(Domain d) {
  return d == Domain::kSource ? "source" : "target";
}

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kNone:
      return "none";
    case Termination::kMaxSteps:
      return "max_steps";
    case Termination::kForceLimit:
      return "force_limit";
    case Termination::kShoulderReached:
      return "shoulder_reached";
    case Termination::kNoProgress:
      return "no_progress";
  }
  return "?";
}

double Trajectory::FinalDeepest() const {
  return privileged.empty() ? meta.initial_deepest_s
                            : privileged.back().deepest_threaded_s;
}

void Trajectory::Validate() const {
  if (privileged.size() != steps.size()) {
    throw ContractError("privileged length differs from step count");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!std::isfinite(steps[i].reward)) throw ContractError("non-finite reward");
    if (steps[i].done != (i + 1 == steps.size())) {
      throw ContractError("trajectory must have exactly one terminal step, at the end");
    }
  }
}

void QuantizeObservation(Observation& obs) {
  auto q3 = [](Vec3& v) {
    for (int i = 0; i < 3; ++i) v[i] = Quantize(v[i]);
  };
  for (Vec3& p : obs.positions) q3(p);
  q3(obs.force.raw);
  q3(obs.force.smoothed);
}

Vec6 QuantizeAction(const Vec6& a) {
  Vec6 q;
  for (int i = 0; i < 6; ++i) q[i] = Quantize(a[i]);
  return q;
}

std::vector<uint8_t> SerializeTrajectory(const Trajectory& t) {
  ByteWriter w;
  w.PutBytes(kMagic, 4);
  w.Put<uint32_t>(kTrajectoryVersion);
  w.Put<uint32_t>(static_cast<uint32_t>(t.steps.size()));
  for (const TrajectoryStep& s : t.steps) {
    w.Put<uint32_t>(static_cast<uint32_t>(s.obs.size()));
    for (const Vec3& p : s.obs.positions) PutVec3f(w, p);
    for (PointClass c : s.obs.classes) w.Put<uint8_t>(static_cast<uint8_t>(c));
    PutVec3f(w, s.obs.force.raw);
    PutVec3f(w, s.obs.force.smoothed);
    for (int i = 0; i < 6; ++i) w.Put<float>(static_cast<float>(s.action[i]));
    w.Put<float>(static_cast<float>(s.reward));
    w.Put<uint8_t>(s.done ? 1 : 0);
  }
  w.Put<uint32_t>(static_cast<uint32_t>(t.privileged.size()));
  for (const PrivilegedStep& p : t.privileged) {
    PutVec3d(w, p.shoulder);
    PutVec3d(w, p.elbow);
    PutVec3d(w, p.hand);
    PutVec3d(w, p.gripper);
    PutVec3d(w, p.gripper_rotation);
    w.Put<double>(p.deepest_threaded_s);
    PutVec3d(w, p.raw_force);
  }
  const TrajectoryMeta& m = t.meta;
  w.Put<uint64_t>(m.config_hash);
  w.Put<uint64_t>(m.seed);
  w.Put<uint8_t>(static_cast<uint8_t>(m.reason));
  w.Put<uint8_t>(static_cast<uint8_t>(m.domain));
  w.Put<uint8_t>(static_cast<uint8_t>(m.body.size_class));
  w.Put<double>(m.body.forearm_radius);
  w.Put<double>(m.body.forearm_length);
  w.Put<double>(m.body.upperarm_radius);
  w.Put<double>(m.body.upperarm_length);
  PutString(w, m.garment);
  PutString(w, m.motion);
  w.Put<double>(m.initial_deepest_s);
  return std::move(w.bytes());
}

Trajectory DeserializeTrajectory(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  char magic[4];
  r.GetBytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CorruptFileError("bad trajectory magic", 0);
  }
  uint32_t version = r.Get<uint32_t>();
  if (version != kTrajectoryVersion) {
    throw UnsupportedVersionError(version, kTrajectoryVersion);
  }
  Trajectory t;
  const uint32_t n_steps = r.Get<uint32_t>();
  // Every step needs at least 4 + 24 + 29 bytes.
  r.Require(static_cast<std::size_t>(n_steps) * 57);
  t.steps.resize(n_steps);
  for (TrajectoryStep& s : t.steps) {
    const std::size_t at = r.offset();
    uint32_t n = r.Get<uint32_t>();
    if (n > kMaxPoints) throw CorruptFileError("implausible point count", at);
    r.Require(static_cast<std::size_t>(n) * 13);
    s.obs.positions.resize(n);
    s.obs.classes.resize(n);
    for (Vec3& p : s.obs.positions) p = GetVec3f(r);
    for (PointClass& c : s.obs.classes) {
      const std::size_t cat = r.offset();
      uint8_t v = r.Get<uint8_t>();
      if (v > 2) throw CorruptFileError("bad point class", cat);
      c = static_cast<PointClass>(v);
    }
    s.obs.force.raw = GetVec3f(r);
    s.obs.force.smoothed = GetVec3f(r);
    for (int i = 0; i < 6; ++i) s.action[i] = r.Get<float>();
    s.reward = r.Get<float>();
    const std::size_t dat = r.offset();
    uint8_t done = r.Get<uint8_t>();
    if (done > 1) throw CorruptFileError("bad done flag", dat);
    s.done = done == 1;
  }
  const std::size_t pat = r.offset();
  const uint32_t n_priv = r.Get<uint32_t>();
  if (n_priv != n_steps) {
    throw CorruptFileError("privileged block length mismatch", pat);
  }
  r.Require(static_cast<std::size_t>(n_priv) * 19 * sizeof(double));
  t.privileged.resize(n_priv);
  for (PrivilegedStep& p : t.privileged) {
    p.shoulder = GetVec3d(r);
    p.elbow = GetVec3d(r);
    p.hand = GetVec3d(r);
    p.gripper = GetVec3d(r);
    p.gripper_rotation = GetVec3d(r);
    p.deepest_threaded_s = r.Get<double>();
    p.raw_force = GetVec3d(r);
  }
  TrajectoryMeta& m = t.meta;
  m.config_hash = r.Get<uint64_t>();
  m.seed = r.Get<uint64_t>();
  const std::size_t rat = r.offset();
  uint8_t reason = r.Get<uint8_t>();
  if (reason > 4) throw CorruptFileError("bad termination reason", rat);
  m.reason = static_cast<Termination>(reason);
  const std::size_t dom = r.offset();
  uint8_t domain = r.Get<uint8_t>();
  if (domain > 1) throw CorruptFileError("bad domain", dom);
  m.domain = static_cast<Domain>(domain);
  const std::size_t sat = r.offset();
  uint8_t size = r.Get<uint8_t>();
  if (size > 3) throw CorruptFileError("bad size class", sat);
  m.body.size_class = static_cast<SizeClass>(size);
  m.body.forearm_radius = r.Get<double>();
  m.body.forearm_length = r.Get<double>();
  m.body.upperarm_radius = r.Get<double>();
  m.body.upperarm_length = r.Get<double>();
  m.garment = GetString(r);
  m.motion = GetString(r);
  m.initial_deepest_s = r.Get<double>();
  if (!r.AtEnd()) throw CorruptFileError("trailing bytes", r.offset());
  return t;
}

void SaveTrajectory(const Trajectory& t, const std::string& path) {
  WriteFileBytes(path, SerializeTrajectory(t));
}

Trajectory LoadTrajectory(const std::string& path) {
  return DeserializeTrajectory(ReadFileBytes(path));
}

void SaveTrajectories(const std::vector<Trajectory>& ts, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%05zu.drs", i);
    SaveTrajectory(ts[i], (std::filesystem::path(dir) / name).string());
  }
}

std::vector<Trajectory> LoadTrajectories(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".drs") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Trajectory> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(LoadTrajectory(f.string()));
  return out;
}

}  // namespace dresslab
