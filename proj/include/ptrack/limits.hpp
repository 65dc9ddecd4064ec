// Copyright 2026 The ptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ptrack/types.hpp"

namespace ptrack {

/// Tolerance applied to every limit comparison.
inline constexpr double kLimitSlack = 1e-9;
/// Tolerance used when planning the admissible range; smaller than
/// kLimitSlack so that rounding in the integration cannot push a planned
/// state past the checked limits.
inline constexpr double kPlanningSlack = 0.5 * kLimitSlack;
/// |v| and |a| below this count as standing still.
inline constexpr double kRestTolerance = 1e-9;

struct JointLimits {
  double p_min = 0.0, p_max = 0.0;  // rad
  double v_min = 0.0, v_max = 0.0;  // rad/s
  double a_min = 0.0, a_max = 0.0;  // rad/s^2
  double j_min = 0.0, j_max = 0.0;  // rad/s^3

  /// Throws ConfigError naming the offending field when the sign conventions
  /// p_min < p_max, v_min < 0 < v_max, a_min < 0 < a_max, j_min < 0 < j_max
  /// do not hold.
  void validate(const std::string& context = "joint") const;
};

using RobotLimits = std::vector<JointLimits>;

struct KinematicState {
  JointVector p, v, a;

  static KinematicState at_rest(const JointVector& position);
  int dimension() const { return static_cast<int>(p.size()); }
};

/// Per-joint interval of admissible next accelerations.
struct AccelRange {
  JointVector lo, hi;
};

/// Normalized action, one component per joint.
struct Action {
  JointVector values;

  /// Clamps every component to [-1, 1]. Throws PreconditionError on NaN/inf.
  static Action from(const JointVector& raw);
};

struct Setpoint {
  double t = 0.0;  // time since the segment start (s)
  JointVector p, v, a;
};

/// One decision interval with linearly interpolated acceleration.
struct Segment {
  JointVector a_start, a_end;
  double duration = 0.0;
  /// Setpoints at k * duration / substeps for k = 1..substeps.
  std::vector<Setpoint> setpoints;
};

// ---------------------------------------------------------------------------
// Single-joint primitives. The multi-joint API below applies these per joint.

struct JointState {
  double p = 0.0, v = 0.0, a = 0.0;
};

struct ScalarRange {
  double lo = 0.0, hi = 0.0;
};

/// State after one interval of length dt with acceleration ramping to a_next.
JointState advance(const JointState& s, double a_next, double dt);

/// Extremes of position and velocity over one interval.
struct IntervalExtremes {
  double p_lo, p_hi, v_lo, v_hi;
};
IntervalExtremes interval_extremes(const JointState& s, double a_next, double dt);

/// Velocity change while the acceleration ramps from `a` to zero in steps of
/// at most the jerk limit times dt, the last step being partial.
double ramp_to_zero_gain(double a, const JointLimits& lim, double dt);

/// Next acceleration of the deterministic braking law. Preferred is the
/// strongest admissible deceleration that still lets the acceleration return
/// to zero exactly when the velocity does. When the next state of that law
/// would fail braking_is_safe, the joint decelerates fully instead, which may
/// leave it moving briefly in the opposite direction.
double braking_acceleration(const JointState& s, const JointLimits& lim, double dt);
/// Whether full deceleration of the motion toward each position limit stops
/// that motion without any limit violation. Monotone in the state, so the
/// admissible next accelerations form an interval.
bool braking_is_safe(const JointState& s, const JointLimits& lim, double dt);
/// Admissible next-acceleration interval of one joint. Always contains
/// braking_acceleration(s).
ScalarRange feasible_range(const JointState& s, const JointLimits& lim, double dt);

// ---------------------------------------------------------------------------

/// Throws PreconditionError when `state` exceeds `limits` beyond kLimitSlack
/// or has the wrong dimension.
void check_state(const KinematicState& state, const RobotLimits& limits);

AccelRange feasible_range(const KinematicState& state, const RobotLimits& limits, double dt);

/// a' = lo + (1 + action) / 2 * (hi - lo), per joint.
JointVector map_action(const Action& action, const AccelRange& range);
/// Inverse of map_action; joints with an empty range map to 0.
Action unmap_action(const JointVector& accel, const AccelRange& range);

/// Closed-form integration of one interval. Returns the segment (with
/// `substeps` setpoints) and the end state.
std::pair<Segment, KinematicState> integrate_segment(const KinematicState& state,
                                                     const JointVector& a_next, double dt,
                                                     int substeps);

/// Segments that bring every joint to rest with the braking law. Empty when
/// the robot already stands still.
std::vector<Segment> brake_to_rest(const KinematicState& state, const RobotLimits& limits,
                                   double dt, int substeps = 10);

/// Upper bound on the number of braking steps for one joint whenever the
/// exact-rest law is safe. A joint that must first decelerate fully close to a
/// position limit can need a few more steps.
long braking_step_bound(const JointLimits& lim, double dt);

/// Number of limit violations in `segment` beyond `slack`, including the
/// segment's jerk.
int count_violations(const Segment& segment, const RobotLimits& limits,
                     double slack = kLimitSlack);

/// Writes one row per setpoint: t, then p, v, a for every joint.
void write_setpoints_csv(std::ostream& out, const std::vector<Segment>& segments,
                         double t0 = 0.0);

}  // namespace ptrack
