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

#include "ptrack/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ptrack {

namespace {

constexpr int kBisectionIterations = 60;
// Width (rad/s^2) at which the feasible-range bisection stops.
constexpr double kRangeTolerance = 1e-11;

JointLimits mirrored(const JointLimits& l) {
  return {-l.p_max, -l.p_min, -l.v_max, -l.v_min, -l.a_max, -l.a_min, -l.j_max, -l.j_min};
}

JointState mirrored(const JointState& s) { return {-s.p, -s.v, -s.a}; }

bool at_rest(const JointState& s) {
  return std::abs(s.v) <= kRestTolerance && std::abs(s.a) <= kRestTolerance;
}

// Gain of the discrete ramp-down of a positive acceleration x at rate
// `rate` per step: m full steps followed by one partial step of size r.
double positive_ramp_gain(double x, double rate, double dt) {
  if (x <= 0.0) return 0.0;
  const double m = std::max(0.0, std::ceil(x / rate) - 1.0);
  const double r = x - m * rate;
  return dt * (m * x - rate * m * m / 2.0) + r * dt / 2.0;
}

double step_toward_zero(double a, const JointLimits& lim, double dt) {
  if (a > 0.0) return std::max(a + lim.j_min * dt, 0.0);
  if (a < 0.0) return std::min(a + lim.j_max * dt, 0.0);
  return 0.0;
}

// Braking law for the case where the predicted rest velocity is positive.
double braking_acceleration_positive(const JointState& s, const JointLimits& lim, double dt) {
  const double window_lo = std::max(s.a + lim.j_min * dt, lim.a_min);
  const double ramp = step_toward_zero(s.a, lim, dt);
  const auto rest_velocity = [&](double x) {
    return s.v + (s.a + x) * dt / 2.0 + ramp_to_zero_gain(x, lim, dt);
  };
  if (window_lo >= ramp || rest_velocity(window_lo) >= 0.0) return std::min(window_lo, ramp);
  // rest_velocity is continuous, increasing, and linear between multiples of
  // the per-step jerk, so the root is found piece by piece.
  const double up = -lim.j_min * dt;
  const double down = lim.j_max * dt;
  double a = window_lo;  // rest_velocity(a) < 0
  double fa = rest_velocity(a);
  const double hi = ramp;  // rest_velocity(hi) >= 0
  for (;;) {
    const double piece_end =
        a < 0.0 ? -(std::ceil(-a / down) - 1.0) * down : (std::floor(a / up) + 1.0) * up;
    const double b = std::min(piece_end, hi);
    const double fb = rest_velocity(b);
    if (fb < 0.0 && b < hi) {
      a = b;
      fa = fb;
      continue;
    }
    double x = a - fa * (b - a) / (fb - fa);
    x = std::clamp(x, a, b);
    // Rounding may leave the interpolated root just below zero rest velocity.
    double nudge = std::numeric_limits<double>::min() + std::abs(x) * std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 64 && rest_velocity(x) < 0.0 && x < b; ++i) {
      x = std::min(x + nudge, b);
      nudge *= 2.0;
    }
    return rest_velocity(x) >= 0.0 ? x : b;
  }
}

bool within(double x, double lo, double hi, double slack = kPlanningSlack) {
  return x >= lo - slack && x <= hi + slack;
}

// Velocity at the end of the interval plus the overshoot of an immediate
// maximum-jerk ramp of the acceleration back to zero.
bool ramp_velocity_ok(const JointState& s, double x, const JointLimits& lim, double dt) {
  const double v_end = s.v + (s.a + x) * dt / 2.0;
  const double j_lim = x > 0.0 ? -lim.j_min : lim.j_max;
  const double overshoot = x * std::abs(x) / (2.0 * j_lim);
  return within(v_end + overshoot, lim.v_min, lim.v_max);
}

bool interval_ok(const JointState& s, double x, const JointLimits& lim, double dt) {
  if (!within(x, lim.a_min, lim.a_max)) return false;
  if (!within((x - s.a) / dt, lim.j_min, lim.j_max)) return false;
  const IntervalExtremes e = interval_extremes(s, x, dt);
  return within(e.p_lo, lim.p_min, lim.p_max) && within(e.p_hi, lim.p_min, lim.p_max) &&
         within(e.v_lo, lim.v_min, lim.v_max) && within(e.v_hi, lim.v_min, lim.v_max);
}

bool candidate_ok(const JointState& s, double x, const JointLimits& lim, double dt) {
  return interval_ok(s, x, lim, dt) && ramp_velocity_ok(s, x, lim, dt) &&
         braking_is_safe(advance(s, x, dt), lim, dt);
}

void check_joint_state(const JointState& s, const JointLimits& lim, int joint) {
  const auto fail = [&](const char* what, double value) {
    throw PreconditionError("joint " + std::to_string(joint) + " " + what + " " +
                            std::to_string(value) + " outside its limits");
  };
  if (!std::isfinite(s.p) || !within(s.p, lim.p_min, lim.p_max, kLimitSlack)) fail("position", s.p);
  if (!std::isfinite(s.v) || !within(s.v, lim.v_min, lim.v_max, kLimitSlack)) fail("velocity", s.v);
  if (!std::isfinite(s.a) || !within(s.a, lim.a_min, lim.a_max, kLimitSlack)) fail("acceleration", s.a);
}

JointState joint_state(const KinematicState& k, Eigen::Index j) { return {k.p[j], k.v[j], k.a[j]}; }

}  // namespace

void JointLimits::validate(const std::string& context) const {
  const auto require = [&](bool ok, const char* field, const char* rule) {
    if (!ok) throw ConfigError(context + "." + field + ": " + rule);
  };
  require(std::isfinite(p_min) && std::isfinite(p_max) && p_min < p_max, "p_min", "needs p_min < p_max");
  require(std::isfinite(v_min) && v_min < 0.0, "v_min", "must be negative");
  require(std::isfinite(v_max) && v_max > 0.0, "v_max", "must be positive");
  require(std::isfinite(a_min) && a_min < 0.0, "a_min", "must be negative");
  require(std::isfinite(a_max) && a_max > 0.0, "a_max", "must be positive");
  require(std::isfinite(j_min) && j_min < 0.0, "j_min", "must be negative");
  require(std::isfinite(j_max) && j_max > 0.0, "j_max", "must be positive");
}

KinematicState KinematicState::at_rest(const JointVector& position) {
  return {position, JointVector::Zero(position.size()), JointVector::Zero(position.size())};
}

Action Action::from(const JointVector& raw) {
  if (!raw.allFinite()) throw PreconditionError("action contains non-finite values");
  return {raw.cwiseMax(-1.0).cwiseMin(1.0)};
}

JointState advance(const JointState& s, double a_next, double dt) {
  JointState out;
  out.a = a_next;
  out.v = s.v + (s.a + a_next) * dt / 2.0;
  out.p = s.p + s.v * dt + (2.0 * s.a + a_next) * dt * dt / 6.0;
  return out;
}

IntervalExtremes interval_extremes(const JointState& s, double a_next, double dt) {
  const double da = a_next - s.a;
  const auto pos = [&](double t) {
    return s.p + s.v * t + s.a * t * t / 2.0 + da * t * t * t / (6.0 * dt);
  };
  const JointState end = advance(s, a_next, dt);
  IntervalExtremes e{std::min(s.p, end.p), std::max(s.p, end.p), std::min(s.v, end.v),
                     std::max(s.v, end.v)};

  // Velocity extremum where the acceleration crosses zero.
  if (da != 0.0) {
    const double t = -s.a * dt / da;
    if (t > 0.0 && t < dt) {
      const double v = s.v + s.a * t / 2.0;
      e.v_lo = std::min(e.v_lo, v);
      e.v_hi = std::max(e.v_hi, v);
    }
  }

  // Position extrema where v(t) = A t^2 + B t + C vanishes.
  const double A = da / (2.0 * dt);
  const double B = s.a;
  const double C = s.v;
  const auto consider = [&](double t) {
    if (t > 0.0 && t < dt) {
      const double p = pos(t);
      e.p_lo = std::min(e.p_lo, p);
      e.p_hi = std::max(e.p_hi, p);
    }
  };
  if (A == 0.0) {
    if (B != 0.0) consider(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B == 0.0 ? 1.0 : B));
      if (q != 0.0) {
        consider(q / A);
        consider(C / q);
      } else {
        consider(0.0);
      }
    }
  }
  return e;
}

double ramp_to_zero_gain(double a, const JointLimits& lim, double dt) {
  if (a > 0.0) return positive_ramp_gain(a, -lim.j_min * dt, dt);
  if (a < 0.0) return -positive_ramp_gain(-a, lim.j_max * dt, dt);
  return 0.0;
}

namespace {

// The law that brings velocity and acceleration to zero together.
double exact_rest_acceleration(const JointState& s, const JointLimits& lim, double dt) {
  if (s.v == 0.0 && s.a == 0.0) return 0.0;
  const double rest = s.v + ramp_to_zero_gain(s.a, lim, dt);
  if (rest > 0.0) return braking_acceleration_positive(s, lim, dt);
  if (rest < 0.0) return -braking_acceleration_positive(mirrored(s), mirrored(lim), dt);
  return step_toward_zero(s.a, lim, dt);
}

long safety_step_guard(const JointLimits& lim, double dt) { return 4 * braking_step_bound(lim, dt) + 16; }

// Strongest deceleration of upward motion whose ramp back to zero
// acceleration keeps the velocity above v_min. NaN when the jerk window
// holds no such value.
double upward_stop_acceleration(const JointState& s, const JointLimits& lim, double dt) {
  const double window_lo = std::max(s.a + lim.j_min * dt, lim.a_min);
  const double window_hi = std::min(s.a + lim.j_max * dt, lim.a_max);
  // Margin of the ramp velocity at x = 0; the ramp velocity increases in x.
  const double c = s.v + s.a * dt / 2.0 - lim.v_min;
  double x = 0.0;
  if (c >= 0.0) {
    x = lim.j_max * (dt / 2.0 - std::sqrt(dt * dt / 4.0 + 2.0 * c / lim.j_max));
  } else {
    x = -lim.j_min * (std::sqrt(dt * dt / 4.0 - 2.0 * c / -lim.j_min) - dt / 2.0);
  }
  x = std::max(x, window_lo);
  return x <= window_hi ? x : std::numeric_limits<double>::quiet_NaN();
}

// Decelerates any upward motion with upward_stop_acceleration until the
// velocity stays non-positive even while the acceleration ramps back to zero.
// The position peak of that motion grows with the state.
bool upward_stop_safe(const JointState& start, const JointLimits& lim, double dt) {
  const long max_steps = safety_step_guard(lim, dt);
  JointState s = start;
  for (long step = 0; step < max_steps; ++step) {
    if (s.v <= 0.0 && s.v + ramp_to_zero_gain(s.a, lim, dt) <= 0.0) return true;
    const double x = upward_stop_acceleration(s, lim, dt);
    if (std::isnan(x)) return false;
    // The lower position limit is the business of the mirrored check.
    const IntervalExtremes e = interval_extremes(s, x, dt);
    if (e.p_hi > lim.p_max + kPlanningSlack || !within(e.v_lo, lim.v_min, lim.v_max) ||
        !within(e.v_hi, lim.v_min, lim.v_max) || !ramp_velocity_ok(s, x, lim, dt)) {
      return false;
    }
    s = advance(s, x, dt);
  }
  return false;
}

}  // namespace

double braking_acceleration(const JointState& s, const JointLimits& lim, double dt) {
  const double exact = exact_rest_acceleration(s, lim, dt);
  if (candidate_ok(s, exact, lim, dt)) return exact;
  const double down = upward_stop_acceleration(s, lim, dt);
  const double up = -upward_stop_acceleration(mirrored(s), mirrored(lim), dt);
  const bool upward = s.v + ramp_to_zero_gain(s.a, lim, dt) > 0.0;
  for (double x : {upward ? down : up, upward ? up : down}) {
    if (!std::isnan(x) && candidate_ok(s, x, lim, dt)) return x;
  }
  return exact;
}

long braking_step_bound(const JointLimits& lim, double dt) {
  return static_cast<long>(std::ceil((lim.v_max - lim.v_min) / (-lim.a_min * dt)) +
                           std::ceil((lim.a_max - lim.a_min) / (lim.j_max * dt))) +
         2;
}

bool braking_is_safe(const JointState& s, const JointLimits& lim, double dt) {
  return upward_stop_safe(s, lim, dt) && upward_stop_safe(mirrored(s), mirrored(lim), dt);
}

ScalarRange feasible_range(const JointState& s, const JointLimits& lim, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("decision interval must be positive");
  const double window_lo = std::max(s.a + lim.j_min * dt, lim.a_min);
  const double window_hi = std::min(s.a + lim.j_max * dt, lim.a_max);
  const double brake = std::clamp(braking_acceleration(s, lim, dt), window_lo, window_hi);
  if (!candidate_ok(s, brake, lim, dt)) {
    // Only reachable from states that were not produced by this module.
    return {brake, brake};
  }

  const auto shrink = [&](double good, double bad) {
    for (int i = 0; i < kBisectionIterations; ++i) {
      const double mid = 0.5 * (good + bad);
      if (mid == good || mid == bad || std::abs(good - bad) <= kRangeTolerance) break;
      if (candidate_ok(s, mid, lim, dt)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    return good;
  };

  ScalarRange range;
  range.hi = candidate_ok(s, window_hi, lim, dt) ? window_hi : shrink(brake, window_hi);
  range.lo = candidate_ok(s, window_lo, lim, dt) ? window_lo : shrink(brake, window_lo);
  return range;
}

void check_state(const KinematicState& state, const RobotLimits& limits) {
  const auto n = static_cast<Eigen::Index>(limits.size());
  if (state.p.size() != n || state.v.size() != n || state.a.size() != n) {
    throw PreconditionError("kinematic state dimension does not match the " + std::to_string(n) +
                            " joint limits");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    check_joint_state(joint_state(state, j), limits[static_cast<std::size_t>(j)], static_cast<int>(j));
  }
}

AccelRange feasible_range(const KinematicState& state, const RobotLimits& limits, double dt) {
  check_state(state, limits);
  const auto n = static_cast<Eigen::Index>(limits.size());
  AccelRange range{JointVector(n), JointVector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const ScalarRange r = feasible_range(joint_state(state, j), limits[static_cast<std::size_t>(j)], dt);
    range.lo[j] = r.lo;
    range.hi[j] = r.hi;
  }
  return range;
}

JointVector map_action(const Action& action, const AccelRange& range) {
  const JointVector u = action.values.cwiseMax(-1.0).cwiseMin(1.0);
  JointVector out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] == 1.0) {
      out[j] = range.hi[j];
    } else if (u[j] == -1.0) {
      out[j] = range.lo[j];
    } else {
      const double x = range.lo[j] + (1.0 + u[j]) / 2.0 * (range.hi[j] - range.lo[j]);
      out[j] = std::clamp(x, range.lo[j], range.hi[j]);
    }
  }
  return out;
}

Action unmap_action(const JointVector& accel, const AccelRange& range) {
  JointVector u(accel.size());
  for (Eigen::Index j = 0; j < accel.size(); ++j) {
    const double span = range.hi[j] - range.lo[j];
    u[j] = span > 0.0 ? std::clamp(2.0 * (accel[j] - range.lo[j]) / span - 1.0, -1.0, 1.0) : 0.0;
  }
  return {u};
}

std::pair<Segment, KinematicState> integrate_segment(const KinematicState& state,
                                                     const JointVector& a_next, double dt,
                                                     int substeps) {
  if (substeps < 1) throw PreconditionError("integrate_segment needs substeps >= 1");
  const Eigen::Index n = state.p.size();
  Segment seg;
  seg.a_start = state.a;
  seg.a_end = a_next;
  seg.duration = dt;
  seg.setpoints.resize(static_cast<std::size_t>(substeps));

  KinematicState end{JointVector(n), JointVector(n), JointVector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const JointState e = advance(joint_state(state, j), a_next[j], dt);
    end.p[j] = e.p;
    end.v[j] = e.v;
    end.a[j] = e.a;
  }
  for (int k = 1; k <= substeps; ++k) {
    Setpoint& sp = seg.setpoints[static_cast<std::size_t>(k - 1)];
    if (k == substeps) {
      sp = {dt, end.p, end.v, end.a};
      break;
    }
    const double t = dt * k / substeps;
    sp.t = t;
    sp.p.resize(n);
    sp.v.resize(n);
    sp.a.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a0 = state.a[j];
      const double da = a_next[j] - a0;
      sp.a[j] = a0 + da * t / dt;
      sp.v[j] = state.v[j] + a0 * t + da * t * t / (2.0 * dt);
      sp.p[j] = state.p[j] + state.v[j] * t + a0 * t * t / 2.0 + da * t * t * t / (6.0 * dt);
    }
  }
  return {std::move(seg), std::move(end)};
}

std::vector<Segment> brake_to_rest(const KinematicState& state, const RobotLimits& limits,
                                   double dt, int substeps) {
  check_state(state, limits);
  const auto n = static_cast<Eigen::Index>(limits.size());
  long max_steps = 0;
  for (const auto& l : limits) max_steps = std::max(max_steps, 4 * braking_step_bound(l, dt) + 16);

  std::vector<Segment> segments;
  KinematicState s = state;
  for (long step = 0; step < max_steps; ++step) {
    bool all_rest = true;
    JointVector next(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const JointState js = joint_state(s, j);
      if (at_rest(js)) {
        next[j] = 0.0;
        // A joint at rest stays exactly at rest.
        if (js.a != 0.0 || js.v != 0.0) all_rest = false;
        continue;
      }
      all_rest = false;
      next[j] = braking_acceleration(js, limits[static_cast<std::size_t>(j)], dt);
    }
    if (all_rest) return segments;
    auto [seg, end] = integrate_segment(s, next, dt, substeps);
    segments.push_back(std::move(seg));
    s = std::move(end);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (at_rest(joint_state(s, j))) {
        s.v[j] = 0.0;
        s.a[j] = 0.0;
      }
    }
  }
  throw RuntimeFailure("braking did not reach rest within " + std::to_string(max_steps) + " steps");
}

int count_violations(const Segment& segment, const RobotLimits& limits, double slack) {
  int violations = 0;
  const auto out = [slack](double x, double lo, double hi) { return x < lo - slack || x > hi + slack; };
  for (std::size_t j = 0; j < limits.size(); ++j) {
    const auto& l = limits[j];
    const auto jj = static_cast<Eigen::Index>(j);
    if (out((segment.a_end[jj] - segment.a_start[jj]) / segment.duration, l.j_min, l.j_max)) ++violations;
    for (const auto& sp : segment.setpoints) {
      if (out(sp.p[jj], l.p_min, l.p_max)) ++violations;
      if (out(sp.v[jj], l.v_min, l.v_max)) ++violations;
      if (out(sp.a[jj], l.a_min, l.a_max)) ++violations;
    }
  }
  return violations;
}

void write_setpoints_csv(std::ostream& out, const std::vector<Segment>& segments, double t0) {
  if (segments.empty()) {
    out << "t\n";
    return;
  }
  const Eigen::Index n = segments.front().a_start.size();
  out << "t";
  for (const char* kind : {"p", "v", "a"}) {
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << kind << j;
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  double t = t0;
  for (const auto& seg : segments) {
    for (const auto& sp : seg.setpoints) {
      out << t + sp.t;
      for (const JointVector* vec : {&sp.p, &sp.v, &sp.a}) {
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << (*vec)[j];
      }
      out << '\n';
    }
    t += seg.duration;
  }
  out.precision(old_precision);
}

}  // namespace ptrack
