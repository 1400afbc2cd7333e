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

#include "dresslab/arm_kinematics.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dresslab {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d ShoulderRotation(const JointState& j) {
  return (Eigen::AngleAxisd(j.shoulder_abduction, Vec3::UnitY()) *
          Eigen::AngleAxisd(j.shoulder_flexion, Vec3::UnitZ()) *
          Eigen::AngleAxisd(j.shoulder_rotation, Vec3::UnitX()))
      .toRotationMatrix();
}

bool InBox(const Vec3& a, const Vec3& b, double half_width) {
  return ((a - b).cwiseAbs().array() <= half_width).all();
}

}  // namespace

std::string_view SizeClassName(SizeClass size) {
  switch (size) {
    case SizeClass::kSmall:
      return "Small";
    case SizeClass::kMedium:
      return "Medium";
    case SizeClass::kLarge:
      return "Large";
    case SizeClass::kXLarge:
      return "XLarge";
  }
  return "?";
}

SizeClass ParseSizeClass(std::string_view name) {
  for (SizeClass s : {SizeClass::kSmall, SizeClass::kMedium, SizeClass::kLarge,
                      SizeClass::kXLarge}) {
    if (SizeClassName(s) == name) return s;
  }
  throw RangeError("unknown body size '" + std::string(name) + "'");
}

void BodySize::Validate() const {
  auto check = [](double v, double lo, double hi, const char* what) {
    if (!(v >= lo - 1e-12 && v <= hi + 1e-12)) {
      throw RangeError(std::string(what) + " = " + std::to_string(v) +
                       " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
  };
  check(forearm_radius, 0.025, 0.045, "forearm_radius");
  check(forearm_length, 0.20, 0.28, "forearm_length");
  check(upperarm_radius, 0.04, 0.06, "upperarm_radius");
  check(upperarm_length, 0.24, 0.30, "upperarm_length");
  if (!(forearm_radius < upperarm_radius)) {
    throw RangeError("forearm_radius must be smaller than upperarm_radius");
  }
}

BodySize StandardBody(SizeClass size) {
  switch (size) {
    case SizeClass::kSmall:
      return {0.025, 0.20, 0.040, 0.24, size};
    case SizeClass::kMedium:
      return {0.032, 0.23, 0.047, 0.26, size};
    case SizeClass::kLarge:
      return {0.038, 0.26, 0.053, 0.28, size};
    case SizeClass::kXLarge:
      return {0.045, 0.28, 0.060, 0.30, size};
  }
  return {};
}

void JointState::Validate() const {
  auto shoulder = [](double v, const char* what) {
    if (!(v >= -kPi && v <= kPi)) {
      throw RangeError(std::string(what) + " = " + std::to_string(v) +
                       " outside [-pi, pi]");
    }
  };
  shoulder(shoulder_abduction, "shoulder_abduction");
  shoulder(shoulder_flexion, "shoulder_flexion");
  shoulder(shoulder_rotation, "shoulder_rotation");
  if (!(elbow_flexion >= 0.0 && elbow_flexion <= kElbowMax)) {
    throw RangeError("elbow_flexion = " + std::to_string(elbow_flexion) +
                     " outside [0, 2.6]");
  }
}

JointState JointState::Clamped() const {
  return {std::clamp(shoulder_abduction, -kPi, kPi),
          std::clamp(shoulder_flexion, -kPi, kPi),
          std::clamp(shoulder_rotation, -kPi, kPi),
          std::clamp(elbow_flexion, 0.0, kElbowMax)};
}

JointState JointState::operator+(const JointState& o) const {
  return {shoulder_abduction + o.shoulder_abduction,
          shoulder_flexion + o.shoulder_flexion,
          shoulder_rotation + o.shoulder_rotation,
          elbow_flexion + o.elbow_flexion};
}

JointState JointState::operator-(const JointState& o) const {
  return {shoulder_abduction - o.shoulder_abduction,
          shoulder_flexion - o.shoulder_flexion,
          shoulder_rotation - o.shoulder_rotation,
          elbow_flexion - o.elbow_flexion};
}

JointState JointState::operator*(double k) const {
  return {shoulder_abduction * k, shoulder_flexion * k, shoulder_rotation * k,
          elbow_flexion * k};
}

double ArmPose::BendAngle() const {
  double c = std::clamp(ForearmDirection().dot(UpperarmDirection()), -1.0, 1.0);
  return std::acos(c);
}

std::string_view MotionNameString(MotionName name) {
  switch (name) {
    case MotionName::kRaiseArm:
      return "raise_arm";
    case MotionName::kLowerArm:
      return "lower_arm";
    case MotionName::kOpenArm:
      return "open_arm";
    case MotionName::kReachPocket:
      return "reach_pocket";
    case MotionName::kReachSide:
      return "reach_side";
    case MotionName::kScratchHead:
      return "scratch_head";
    case MotionName::kReachUp:
      return "reach_up";
  }
  return "?";
}

MotionName ParseMotionName(std::string_view name) {
  for (MotionName m : kAllMotionNames) {
    if (MotionNameString(m) == name) return m;
  }
  throw RangeError("unknown motion '" + std::string(name) + "'");
}

int DefaultMotionSteps(MotionName name) {
  switch (name) {
    case MotionName::kRaiseArm:
    case MotionName::kLowerArm:
    case MotionName::kOpenArm:
      return 60;
    default:
      return 120;
  }
}

std::string MotionSpec::Label() const {
  return (reversed ? "rev_" : "") + std::string(MotionNameString(name));
}

JointState DefaultDressingPose() { return {0.35, -0.25, -1.5707963267948966, 0.45}; }

MotionSpec DefaultMotion(MotionName name, bool reversed) {
  JointState delta;
  switch (name) {
    case MotionName::kRaiseArm:
      delta = {0.0, 0.6, 0.0, 0.0};
      break;
    case MotionName::kLowerArm:
      delta = {0.0, -0.5, 0.0, 0.0};
      break;
    case MotionName::kOpenArm:
      delta = {-0.7, 0.0, 0.0, 0.0};
      break;
    case MotionName::kReachPocket:
      delta = {0.4, -0.7, 0.0, 0.5};
      break;
    case MotionName::kReachSide:
      delta = {-0.9, 0.1, 0.0, 0.0};
      break;
    case MotionName::kScratchHead:
      delta = {0.0, 0.7, 0.6, 1.4};
      break;
    case MotionName::kReachUp:
      delta = {0.0, 1.2, 0.0, -0.35};
      break;
  }
  MotionSpec spec;
  spec.name = name;
  spec.reversed = reversed;
  spec.start = DefaultDressingPose();
  spec.target = spec.start + delta;
  spec.steps = DefaultMotionSteps(name);
  return spec;
}

std::vector<MotionSpec> AllMotions() {
  std::vector<MotionSpec> out;
  for (bool rev : {false, true}) {
    for (MotionName m : kAllMotionNames) out.push_back(DefaultMotion(m, rev));
  }
  return out;
}

ArmPose ForwardKinematics(const JointState& joints, const BodySize& body,
                          const Vec3& shoulder_anchor) {
  joints.Validate();
  Eigen::Matrix3d r = ShoulderRotation(joints);
  Eigen::Matrix3d r_elbow =
      r * Eigen::AngleAxisd(joints.elbow_flexion, Vec3::UnitZ())
              .toRotationMatrix();
  ArmPose pose;
  pose.body = body;
  pose.shoulder = shoulder_anchor;
  pose.elbow = shoulder_anchor + r.col(0) * body.upperarm_length;
  pose.hand = pose.elbow + r_elbow.col(0) * body.forearm_length;
  return pose;
}

std::vector<JointState> InterpolateMotion(const MotionSpec& spec) {
  if (spec.steps < 2) {
    throw RangeError("motion needs at least 2 steps, got " +
                     std::to_string(spec.steps));
  }
  std::vector<JointState> frames;
  frames.reserve(spec.steps);
  const JointState delta = spec.target - spec.start;
  for (int k = 0; k < spec.steps; ++k) {
    if (k == spec.steps - 1) {
      frames.push_back(spec.target);
    } else {
      frames.push_back(spec.start +
                       delta * (static_cast<double>(k) / (spec.steps - 1)));
    }
  }
  if (spec.reversed) std::reverse(frames.begin(), frames.end());
  return frames;
}

JointState SampleInitialConfig(Rng& rng, const JointState& base,
                               const BodySize& body,
                               const Vec3& shoulder_anchor,
                               const OffsetBox& box, double sigma,
                               int max_tries) {
  base.Validate();
  // A zero-width box only admits the base pose itself.
  if (box.elbow <= 0.0 && box.hand <= 0.0) return base;
  const ArmPose ref = ForwardKinematics(base, body, shoulder_anchor);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    JointState cand = base;
    cand.shoulder_abduction += sigma * NormalDraw(rng);
    cand.shoulder_flexion += sigma * NormalDraw(rng);
    cand.shoulder_rotation += sigma * NormalDraw(rng);
    cand.elbow_flexion += sigma * NormalDraw(rng);
    if (cand.elbow_flexion < 0.0 || cand.elbow_flexion > JointState::kElbowMax ||
        std::abs(cand.shoulder_abduction) > kPi ||
        std::abs(cand.shoulder_flexion) > kPi ||
        std::abs(cand.shoulder_rotation) > kPi) {
      continue;
    }
    ArmPose pose = ForwardKinematics(cand, body, shoulder_anchor);
    if (InBox(pose.elbow, ref.elbow, box.elbow) &&
        InBox(pose.hand, ref.hand, box.hand)) {
      return cand;
    }
  }
  throw SamplingFailure("initial configuration: " + std::to_string(max_tries) +
                        " rejections");
}

ArmRegion RegionForArc(double s, const BodySize& body) {
  const double lo = 0.75 * body.forearm_length;
  const double hi = body.forearm_length + 0.25 * body.upperarm_length;
  if (s >= lo && s <= hi) return ArmRegion::kElbowRegion;
  return s < lo ? ArmRegion::kForearm : ArmRegion::kUpperArm;
}

ArcCoordinate ComputeArcCoordinate(const Vec3& p, const ArmPose& arm,
                                   double off_arm_cutoff) {
  const double lf = arm.body.forearm_length;
  const double lu = arm.body.upperarm_length;
  // Forearm segment, hand -> elbow.
  Vec3 df = arm.elbow - arm.hand;
  double tf = std::clamp((p - arm.hand).dot(df) / df.squaredNorm(), 0.0, 1.0);
  double dist_f = (p - (arm.hand + tf * df)).norm();
  // Upper arm segment, elbow -> shoulder.
  Vec3 du = arm.shoulder - arm.elbow;
  double tu = std::clamp((p - arm.elbow).dot(du) / du.squaredNorm(), 0.0, 1.0);
  double dist_u = (p - (arm.elbow + tu * du)).norm();

  ArcCoordinate out;
  if (dist_f <= dist_u) {
    out.s = tf * lf;
    out.distance = dist_f;
  } else {
    out.s = lf + tu * lu;
    out.distance = dist_u;
  }
  out.region = out.distance > off_arm_cutoff ? ArmRegion::kOffArm
                                             : RegionForArc(out.s, arm.body);
  return out;
}

Vec3 PointAtArc(const ArmPose& arm, double s) {
  const double lf = arm.body.forearm_length;
  if (s <= lf) return arm.hand + s * arm.ForearmDirection();
  return arm.elbow + (s - lf) * arm.UpperarmDirection();
}

Vec3 TangentAtArc(const ArmPose& arm, double s) {
  return s < arm.body.forearm_length ? arm.ForearmDirection()
                                     : arm.UpperarmDirection();
}

double RadiusAtArc(const ArmPose& arm, double s) {
  return s < arm.body.forearm_length ? arm.body.forearm_radius
                                     : arm.body.upperarm_radius;
}

}  // namespace dresslab
