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

#include "dresslab/garment.h"

#include <algorithm>
#include <cmath>

namespace dresslab {
namespace {

double AngleBetween(const Vec3& a, const Vec3& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

Vec3 ComposeRotation(const Vec3& delta, const Vec3& current) {
  auto to_q = [](const Vec3& aa) {
    double angle = aa.norm();
    if (angle == 0.0) return Eigen::Quaterniond::Identity();
    return Eigen::Quaterniond(Eigen::AngleAxisd(angle, aa / angle));
  };
  Eigen::AngleAxisd out((to_q(delta) * to_q(current)).normalized());
  return out.axis() * out.angle();
}

// Slides threaded ring i toward `proposed`, forward only. Returns true when
// the move was held back by a snag.
bool SlideThreaded(const GarmentSpec& spec, const ArmPose& arm, int i,
                   const Vec3& proposed, bool is_deepest, GarmentState& st) {
  const double s_old = st.ring_s[i];
  const double total = arm.body.TotalLength();
  double s_new = std::min(
      std::max(s_old, ComputeArcCoordinate(proposed, arm, 1e9).s), total);
  if (s_new <= s_old) return false;
  bool blocked = false;
  const double r = spec.ring_radius[i];
  if (r <= RadiusAtArc(arm, s_new) + spec.snag_clearance) {
    // Too tight for the thicker segment: stop just short of it.
    double limit = arm.body.forearm_length - 1e-9;
    s_new = std::max(s_old, std::min(s_new, limit));
    blocked = true;
  }
  if (is_deepest &&
      RegionForArc(s_old, arm.body) == ArmRegion::kElbowRegion) {
    Vec3 pull = st.centers[i + 1] - st.centers[i];
    if (AngleBetween(pull, TangentAtArc(arm, s_old)) >
        spec.elbow_pass_threshold) {
      s_new = s_old;
      blocked = true;
    }
  }
  st.ring_s[i] = s_new;
  st.centers[i] = PointAtArc(arm, s_new);
  return blocked;
}

// Moves ring i toward its grasp-side neighbor to restore rest spacing.
void ProjectLink(const GarmentSpec& spec, const ArmPose& arm, int i,
                 int deepest, GarmentState& st, bool& snagged) {
  Vec3 delta = st.centers[i + 1] - st.centers[i];
  double d = delta.norm();
  if (d <= spec.rest_spacing || d == 0.0) return;
  Vec3 target = st.centers[i] + (d - spec.rest_spacing) / d * delta;
  if (st.threaded[i]) {
    snagged |= SlideThreaded(spec, arm, i, target, i == deepest, st);
  } else {
    st.centers[i] = target;
  }
}

void UpdateThreading(const GarmentSpec& spec, const ArmPose& arm,
                     GarmentState& st) {
  const int n = st.RingCount();
  const double total = arm.body.TotalLength();
  for (int i = n - 2; i >= 0; --i) {
    if (st.threaded[i]) continue;
    if (i != n - 2 && !st.threaded[i + 1]) break;
    ArcCoordinate ac = ComputeArcCoordinate(st.centers[i], arm, 1e9);
    if (!(ac.s > 0.0 && ac.s <= total)) break;
    double r_arm = RadiusAtArc(arm, ac.s);
    double r = spec.ring_radius[i];
    if (!(r > r_arm && ac.distance <= r - r_arm + spec.snag_clearance)) break;
    st.threaded[i] = 1;
    st.ring_s[i] = ac.s;
    st.centers[i] = PointAtArc(arm, ac.s);
  }
  st.deepest_threaded_s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (st.threaded[i]) {
      st.deepest_threaded_s = std::max(st.deepest_threaded_s, st.ring_s[i]);
    }
  }
}

}  // namespace

void GarmentSpec::Validate() const {
  if (ring_count < 4) throw RangeError("ring_count must be >= 4");
  if (static_cast<int>(ring_radius.size()) != ring_count) {
    throw RangeError("ring_radius profile length != ring_count");
  }
  for (double r : ring_radius) {
    if (!(r > 0.0)) throw RangeError("ring radii must be positive");
  }
  if (!(rest_spacing > 0.0)) throw RangeError("rest_spacing must be positive");
  if (!(spring_k > 0.0)) throw RangeError("spring_k must be positive");
  if (snag_clearance < 0.0) throw RangeError("snag_clearance must be >= 0");
  if (n_relax < 1) throw RangeError("n_relax must be >= 1");
  if (noise_sigma < 0.0) throw RangeError("noise_sigma must be >= 0");
}

std::vector<double> TaperedRadii(int ring_count, double cuff_radius,
                                 double opening_radius) {
  std::vector<double> r(ring_count);
  for (int i = 0; i < ring_count; ++i) {
    double t = ring_count == 1 ? 1.0 : static_cast<double>(i) / (ring_count - 1);
    r[i] = cuff_radius + t * (opening_radius - cuff_radius);
  }
  return r;
}

GarmentSpec GarmentProfile(const std::string& name) {
  GarmentSpec g;
  g.name = name;
  if (name == "standard") {
    g.ring_radius = TaperedRadii(12, 0.060, 0.100);
  } else if (name == "wide") {
    g.ring_radius = TaperedRadii(12, 0.070, 0.115);
  } else if (name == "narrow") {
    g.ring_radius = TaperedRadii(12, 0.055, 0.092);
  } else if (name == "short") {
    g.rest_spacing = 0.04;
    g.ring_radius = TaperedRadii(12, 0.060, 0.100);
  } else {
    throw RangeError("unknown garment profile '" + name + "'");
  }
  return g;
}

std::vector<std::string> GarmentProfileNames() {
  return {"standard", "wide", "narrow", "short"};
}

GarmentSpec ToTargetDomain(const GarmentSpec& source) {
  GarmentSpec t = source;
  t.spring_k = 80.0;
  t.noise_sigma = 0.4;
  for (double& r : t.ring_radius) r *= 0.85;
  return t;
}

int GarmentState::DeepestThreaded() const {
  int best = -1;
  for (int i = 0; i < RingCount(); ++i) {
    if (threaded[i] && (best < 0 || ring_s[i] > ring_s[best])) best = i;
  }
  return best;
}

GarmentState InitGarment(const GarmentSpec& spec, const ArmPose& arm,
                         const GraspPose& grasp) {
  spec.Validate();
  if ((grasp.position - arm.hand).norm() > 0.4) {
    throw ContractError("grasp is farther than 0.4 m from the hand");
  }
  const int n = spec.ring_count;
  GarmentState st;
  st.centers.resize(n);
  st.threaded.assign(n, 0);
  st.ring_s.assign(n, 0.0);
  st.grasp = grasp;
  const Vec3 away = -arm.ForearmDirection();
  for (int i = 0; i < n; ++i) {
    st.centers[i] = grasp.position + (n - 1 - i) * spec.rest_spacing * away;
  }
  return st;
}

double SpacingError(const GarmentSpec& spec, const GarmentState& state) {
  double e = 0.0;
  for (int i = 0; i + 1 < state.RingCount(); ++i) {
    double d = (state.centers[i + 1] - state.centers[i]).norm();
    double x = std::max(0.0, d - spec.rest_spacing);
    e += x * x;
  }
  return e;
}

bool RelaxOnce(const GarmentSpec& spec, const ArmPose& arm, GarmentState& state,
               bool& snagged) {
  const int n = state.RingCount();
  const int deepest = state.DeepestThreaded();
  GarmentState next = state;
  bool snag = false;
  for (int i = 0; i + 1 < n; ++i) ProjectLink(spec, arm, i, deepest, next, snag);
  for (int i = n - 2; i >= 0; --i) ProjectLink(spec, arm, i, deepest, next, snag);
  if (SpacingError(spec, next) > SpacingError(spec, state)) return false;
  snagged |= snag;
  state = std::move(next);
  return true;
}

Vec3 ChainForce(const GarmentSpec& spec, const GarmentState& state) {
  const int k = state.DeepestThreaded();
  if (k < 0) return Vec3::Zero();
  const int n = state.RingCount();
  double length = 0.0;
  for (int i = k; i + 1 < n; ++i) {
    length += (state.centers[i + 1] - state.centers[i]).norm();
  }
  double stretch = length - (n - 1 - k) * spec.rest_spacing;
  if (stretch <= 0.0) return Vec3::Zero();
  Vec3 u = state.centers[n - 2] - state.centers[n - 1];
  double un = u.norm();
  if (un == 0.0) return Vec3::Zero();
  return spec.spring_k * stretch * (u / un);
}

GarmentStep StepGarment(const GarmentSpec& spec, const GarmentState& state,
                        const RigidDelta& gripper_delta, const ArmPose& arm,
                        Rng* noise_rng) {
  const int n = state.RingCount();
  GarmentStep out;
  GarmentState& st = out.state;
  st = state;
  // Threaded rings ride along with the arm.
  for (int i = 0; i < n; ++i) {
    if (st.threaded[i]) st.centers[i] = PointAtArc(arm, st.ring_s[i]);
  }
  st.grasp.position += gripper_delta.translation;
  st.grasp.rotation = ComposeRotation(gripper_delta.rotation, st.grasp.rotation);
  st.centers[n - 1] = st.grasp.position;

  for (int it = 0; it < spec.n_relax; ++it) {
    if (!RelaxOnce(spec, arm, st, out.snagged)) break;
  }
  UpdateThreading(spec, arm, st);

  out.raw_force = ChainForce(spec, st);
  if (spec.noise_sigma > 0.0) {
    if (noise_rng == nullptr) {
      throw ContractError("force noise requested without an rng");
    }
    for (int a = 0; a < 3; ++a) {
      out.raw_force[a] += spec.noise_sigma * NormalDraw(*noise_rng);
    }
  }
  return out;
}

DressedLengths ComputeDressedLengths(double deepest_threaded_s,
                                     const BodySize& body) {
  DressedLengths d;
  d.upperarm = std::clamp(deepest_threaded_s - body.forearm_length, 0.0,
                          body.upperarm_length);
  d.forearm = std::clamp(deepest_threaded_s, 0.0, body.forearm_length);
  return d;
}

}  // namespace dresslab
