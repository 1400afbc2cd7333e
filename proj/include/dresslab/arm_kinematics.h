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

#ifndef DRESSLAB_ARM_KINEMATICS_H_
#define DRESSLAB_ARM_KINEMATICS_H_

#include <string>
#include <string_view>
#include <vector>

#include "dresslab/common.h"

namespace dresslab {

enum class SizeClass { kSmall, kMedium, kLarge, kXLarge };

std::string_view SizeClassName(SizeClass size);
SizeClass ParseSizeClass(std::string_view name);

// Two-cylinder arm dimensions in meters.
struct BodySize {
  double forearm_radius = 0.032;
  double forearm_length = 0.23;
  double upperarm_radius = 0.047;
  double upperarm_length = 0.26;
  SizeClass size_class = SizeClass::kMedium;

  double TotalLength() const { return forearm_length + upperarm_length; }
  // Throws RangeError when outside the supported anthropometric ranges.
  void Validate() const;
};

// Evenly spaced over the supported ranges; Medium is the fine-tuning body.
BodySize StandardBody(SizeClass size);

// Three shoulder angles plus elbow flexion, radians.
struct JointState {
  double shoulder_abduction = 0.0;
  double shoulder_flexion = 0.0;
  double shoulder_rotation = 0.0;
  double elbow_flexion = 0.0;

  static constexpr double kElbowMax = 2.6;

  void Validate() const;
  JointState Clamped() const;

  JointState operator+(const JointState& o) const;
  JointState operator-(const JointState& o) const;
  JointState operator*(double k) const;
  bool operator==(const JointState& o) const = default;
};

struct ArmPose {
  Vec3 shoulder = Vec3::Zero();
  Vec3 elbow = Vec3::Zero();
  Vec3 hand = Vec3::Zero();
  BodySize body;

  // Unit vector hand -> elbow.
  Vec3 ForearmDirection() const { return (elbow - hand).normalized(); }
  // Unit vector elbow -> shoulder.
  Vec3 UpperarmDirection() const { return (shoulder - elbow).normalized(); }
  // Interior angle deficit at the elbow: 0 for a straight arm.
  double BendAngle() const;
};

enum class MotionName {
  kRaiseArm,
  kLowerArm,
  kOpenArm,
  kReachPocket,
  kReachSide,
  kScratchHead,
  kReachUp,
};

inline constexpr MotionName kAllMotionNames[] = {
    MotionName::kRaiseArm,    MotionName::kLowerArm,  MotionName::kOpenArm,
    MotionName::kReachPocket, MotionName::kReachSide, MotionName::kScratchHead,
    MotionName::kReachUp};

std::string_view MotionNameString(MotionName name);
MotionName ParseMotionName(std::string_view name);
// 60 for raise/lower/open, 120 for the rest.
int DefaultMotionSteps(MotionName name);

struct MotionSpec {
  MotionName name = MotionName::kRaiseArm;
  bool reversed = false;
  JointState start;
  JointState target;
  int steps = 60;

  // e.g. "raise_arm" or "rev_raise_arm".
  std::string Label() const;
};

// The default dressing posture every motion and randomization starts from:
// upper arm raised slightly to the side, shoulder rotated so the elbow bends
// in the horizontal plane with the forearm angled away from the camera.
JointState DefaultDressingPose();

// Built-in motion table (start = DefaultDressingPose()). These joint targets
// are placeholders chosen so each motion moves the Medium hand >= 0.15 m.
MotionSpec DefaultMotion(MotionName name, bool reversed = false);
// All seven motions, forward then reversed (14 entries).
std::vector<MotionSpec> AllMotions();

// World frame: y up, arm at rest along +x from the shoulder anchor.
// R = Ry(abduction) * Rz(flexion) * Rx(rotation); elbow flexion bends the
// forearm about the rotated z axis.
ArmPose ForwardKinematics(const JointState& joints, const BodySize& body,
                          const Vec3& shoulder_anchor);

// Linear interpolation in joint space; exactly spec.steps frames.
std::vector<JointState> InterpolateMotion(const MotionSpec& spec);

struct OffsetBox {
  double elbow = 0.10;  // per axis, m
  double hand = 0.15;   // per axis, m
};

// Gaussian joint perturbation of `base` accepted when FK puts the elbow and
// hand inside the per-axis boxes around the base pose. Throws
// SamplingFailure after `max_tries` rejections.
JointState SampleInitialConfig(Rng& rng, const JointState& base,
                               const BodySize& body,
                               const Vec3& shoulder_anchor,
                               const OffsetBox& box = {}, double sigma = 0.25,
                               int max_tries = 10000);

enum class ArmRegion { kForearm, kElbowRegion, kUpperArm, kOffArm };

struct ArcCoordinate {
  double s = 0.0;         // arc length from the hand tip, m
  ArmRegion region = ArmRegion::kForearm;
  double distance = 0.0;  // perpendicular distance to the polyline, m
};

inline constexpr double kDefaultOffArmCutoff = 0.5;

// Closest point on the hand -> elbow -> shoulder polyline.
ArcCoordinate ComputeArcCoordinate(const Vec3& p, const ArmPose& arm,
                                   double off_arm_cutoff = kDefaultOffArmCutoff);

// Region for an arc length alone (closed elbow interval).
ArmRegion RegionForArc(double s, const BodySize& body);

// Point on the arm axis at arc length s. Extrapolates linearly past the
// hand (s < 0) and past the shoulder (s > total length).
Vec3 PointAtArc(const ArmPose& arm, double s);
// Unit tangent pointing toward the shoulder at arc length s.
Vec3 TangentAtArc(const ArmPose& arm, double s);
double RadiusAtArc(const ArmPose& arm, double s);

}  // namespace dresslab

#endif  // DRESSLAB_ARM_KINEMATICS_H_
