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
#include "ptrack/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ptrack {

const char* to_string(DoneReason reason) {
  switch (reason) {
    case DoneReason::kNone: return "none";
    case DoneReason::kMaxSteps: return "max_steps";
    case DoneReason::kDeviation: return "deviation";
    case DoneReason::kBallDropped: return "ball_dropped";
  }
  return "unknown";
}

const char* to_string(Task task) { return task == Task::kBallBeam ? "ball-beam" : "none"; }

const char* to_string(KnotSampling sampling) {
  return sampling == KnotSampling::kCurvature ? "curvature" : "distance";
}

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError(field + ": " + rule);
}

}  // namespace

void RewardConfig::validate(const std::string& context) const {
  require(alpha >= 0.0, context + ".alpha", "must be >= 0");
  require(beta >= 0.0, context + ".beta", "must be >= 0");
  require(gamma >= 0.0, context + ".gamma", "must be >= 0");
  require(l_end > 0.0, context + ".l_end", "must be > 0");
  require(d_max > 0.0, context + ".d_max", "must be > 0");
}

void BallBeamConfig::validate(const std::string& context) const {
  require(half_length > 0.0, context + ".half_length", "must be > 0");
  require(gravity > 0.0, context + ".gravity", "must be > 0");
  require(beam_axis.norm() > 0.0, context + ".beam_axis", "must be nonzero");
  require(up.norm() > 0.0, context + ".up", "must be nonzero");
}

void EnvConfig::validate(const std::string& context) const {
  require(dt > 0.0, context + ".dt", "must be > 0");
  require(n_knots >= 2, context + ".n_knots", "must be >= 2");
  require(knot_spacing > 0.0, context + ".knot_spacing", "must be > 0");
  require(termination_deviation > 0.0, context + ".termination_deviation", "must be > 0");
  require(max_steps >= 1, context + ".max_steps", "must be >= 1");
  require(substeps >= 1, context + ".substeps", "must be >= 1");
  reward.validate(context + ".reward");
  ball.validate(context + ".ball_beam");
}

double reward_length(double l, double l_state, const RewardConfig& cfg) {
  l = std::max(l, 0.0);
  if (l_state <= 0.0) {
    const double x = (l - cfg.l_end) / cfg.l_end;
    return l >= cfg.l_end ? 0.0 : std::min(1.0, x * x);
  }
  if (l <= l_state) {
    const double x = l / l_state;
    return x * x;
  }
  if (l <= l_state + cfg.l_end) {
    const double x = (l - (l_state + cfg.l_end)) / cfg.l_end;
    return x * x;
  }
  return 0.0;
}

double reward_deviation(double d, const RewardConfig& cfg) {
  if (d > cfg.d_max) return 0.0;
  const double x = (std::max(d, 0.0) - cfg.d_max) / cfg.d_max;
  return x * x;
}

RewardBreakdown reward_total(double r_l, double r_d, double r_s, const RewardConfig& cfg) {
  RewardBreakdown out;
  out.r_l = r_l;
  out.r_d = r_d;
  out.r_s = r_s;
  out.total = cfg.alpha * r_l + cfg.beta * r_d + cfg.gamma * r_s;
  return out;
}

BallState ball_beam_step(const BallState& state, double beam_angle, double dt, int substeps,
                         const BallBeamConfig& cfg) {
  const double acc = -cfg.gravity * std::sin(beam_angle);
  const double h = dt / std::max(substeps, 1);
  BallState s = state;
  for (int i = 0; i < std::max(substeps, 1); ++i) {
    s.b += s.bdot * h + 0.5 * acc * h * h;
    s.bdot += acc * h;
  }
  return s;
}

double ball_reward(double b, const BallBeamConfig& cfg) {
  const double x = std::abs(b);
  if (x > cfg.half_length) return 0.0;
  const double r = (x - cfg.half_length) / cfg.half_length;
  return r * r;
}

double beam_tilt(const ChainSpec& chain, const JointVector& q, const BallBeamConfig& cfg) {
  const Pose pose = fk(chain, q);
  return std::numbers::pi / 2.0 - orientation_angle(pose.orientation, cfg.up, cfg.beam_axis);
}

double nearest_arc_length(const CubicPath& path, const JointVector& q) {
  const double total = path.total_length();
  if (total <= 0.0) return 0.0;
  constexpr int kGrid = 1000;
  const auto dist = [&](double s) { return (path.eval(s) - q).squaredNorm(); };
  int best = 0;
  double best_d = dist(0.0);
  for (int g = 1; g <= kGrid; ++g) {
    const double dg = dist(total * g / kGrid);
    if (dg < best_d) {
      best_d = dg;
      best = g;
    }
  }
  double a = total * std::max(best - 1, 0) / kGrid;
  double b = total * std::min(best + 1, kGrid) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = dist(c), fd = dist(d);
  for (int it = 0; it < 60 && b - a > 1e-12 * total; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = dist(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = dist(d);
    }
  }
  const double s = 0.5 * (a + b);
  return dist(s) <= best_d ? s : total * best / kGrid;
}

Env::Env(RobotLimits limits, ChainSpec chain, EnvConfig config)
    : limits_(std::move(limits)), chain_(std::move(chain)), config_(std::move(config)) {
  config_.validate();
  for (std::size_t i = 0; i < limits_.size(); ++i) limits_[i].validate("limits[" + std::to_string(i) + "]");
  if (config_.task == Task::kBallBeam && chain_.dimension() != dimension()) {
    throw ConfigError("chain: ball-beam task needs a chain with " + std::to_string(dimension()) +
                      " joints, got " + std::to_string(chain_.dimension()));
  }
}

std::shared_ptr<const PreparedPath> prepare_path(const CubicPath& path, const EnvConfig& config) {
  auto out = std::make_shared<PreparedPath>();
  out->path = path;
  out->knot_spacing = config.knot_spacing;
  out->sampling = config.sampling;
  const double total = path.total_length();
  const int count = std::max(2, static_cast<int>(std::ceil(total / config.knot_spacing - 1e-9)) + 1);
  out->arcs = sample_arc_lengths(path, count, config.sampling);
  for (double s : out->arcs) out->knots.push_back(path.eval(s));
  return out;
}

void Env::set_reference(std::shared_ptr<const PreparedPath> reference) {
  if (!reference) throw PreconditionError("reference path is null");
  if (reference->path.dimension() != dimension()) {
    throw PreconditionError("reference path has " + std::to_string(reference->path.dimension()) +
                            " joints, robot has " + std::to_string(dimension()));
  }
  if (reference->knot_spacing != config_.knot_spacing || reference->sampling != config_.sampling) {
    throw PreconditionError("reference path was prepared for another knot spacing or sampling");
  }
  reference_ = std::move(reference);
}

Observation Env::reset(const CubicPath& reference) {
  if (reference.dimension() != dimension()) {
    throw PreconditionError("reference path has " + std::to_string(reference.dimension()) +
                            " joints, robot has " + std::to_string(dimension()));
  }
  return reset(prepare_path(reference, config_));
}

Observation Env::reset(const CubicPath& reference, const KinematicState& start) {
  if (reference.dimension() != dimension()) {
    throw PreconditionError("reference path has " + std::to_string(reference.dimension()) +
                            " joints, robot has " + std::to_string(dimension()));
  }
  return reset(prepare_path(reference, config_), start);
}

Observation Env::reset(std::shared_ptr<const PreparedPath> reference) {
  if (!reference) throw PreconditionError("reference path is null");
  const JointVector start = reference->path.eval(0.0);
  return reset(std::move(reference), KinematicState::at_rest(start));
}

Observation Env::reset(std::shared_ptr<const PreparedPath> reference, const KinematicState& start) {
  set_reference(std::move(reference));
  check_state(start, limits_);
  state_ = start;
  progress_ = 0.0;
  steps_ = 0;
  ball_ = BallState{};
  done_ = false;
  obs_ = observe();
  return obs_;
}

Observation Env::observe() const {
  Observation obs;
  obs.window = knot_window(reference_->knots, reference_->arcs, progress_, config_.n_knots);
  obs.kin = state_;
  obs.progress = progress_;
  if (config_.task == Task::kBallBeam) obs.feedback = {ball_.b, ball_.bdot};
  return obs;
}

StepResult Env::step(const Action& action_in) {
  if (done_) throw PreconditionError("step called on a finished episode; call reset first");
  const Action action = Action::from(action_in.values);
  if (action.values.size() != dimension()) {
    throw PreconditionError("action has " + std::to_string(action.values.size()) +
                            " components, robot has " + std::to_string(dimension()));
  }
  const CubicPath& ref = reference_->path;
  const double total = ref.total_length();
  const int substeps = config_.substeps;

  StepResult out;
  out.action = action;
  out.a_next = map_action(action, feasible_range(state_, limits_, config_.dt));
  auto [segment, next] = integrate_segment(state_, out.a_next, config_.dt, substeps);

  // Generated arc length and deviation against arc-matched reference points.
  const double p0 = progress_;
  double arc = 0.0;
  double dev_sum = (state_.p - ref.eval(p0)).norm();
  const JointVector* prev = &state_.p;
  for (const Setpoint& sp : segment.setpoints) {
    arc += (sp.p - *prev).norm();
    prev = &sp.p;
    dev_sum += (sp.p - ref.eval(std::min(p0 + arc, total))).norm();
  }
  const double l = arc;
  const double d = dev_sum / (substeps + 1);

  bool dropped = false;
  if (config_.task == Task::kBallBeam) {
    const double h = config_.dt / substeps;
    double tilt_prev = beam_tilt(chain_, state_.p, config_.ball);
    for (const Setpoint& sp : segment.setpoints) {
      const double tilt = beam_tilt(chain_, sp.p, config_.ball);
      ball_ = ball_beam_step(ball_, 0.5 * (tilt_prev + tilt), h, 1, config_.ball);
      tilt_prev = tilt;
      if (std::abs(ball_.b) > config_.ball.half_length) dropped = true;
    }
    out.ball = ball_;
  }

  const double r_l = reward_length(l, obs_.window.l_state, config_.reward);
  const double r_d = reward_deviation(d, config_.reward);
  const double r_s =
      config_.task == Task::kBallBeam && !dropped ? ball_reward(ball_.b, config_.ball) : 0.0;
  out.reward = reward_total(r_l, r_d, r_s, config_.reward);
  out.reward.l = l;
  out.reward.d = d;

  state_ = next;
  progress_ = std::min(p0 + l, total);
  ++steps_;

  if (d > config_.termination_deviation) {
    out.reason = DoneReason::kDeviation;
  } else if (dropped) {
    out.reason = DoneReason::kBallDropped;
  } else if (steps_ >= config_.max_steps) {
    out.reason = DoneReason::kMaxSteps;
  }
  done_ = out.reason != DoneReason::kNone;
  out.done = done_;
  out.segment = std::move(segment);
  obs_ = observe();
  out.obs = obs_;
  return out;
}

Observation Env::swap_path(const CubicPath& reference, SwapPolicy policy) {
  if (done_) throw PreconditionError("swap_path called on a finished episode");
  if (reference.dimension() != dimension()) {
    throw PreconditionError("reference path has " + std::to_string(reference.dimension()) +
                            " joints, robot has " + std::to_string(dimension()));
  }
  set_reference(prepare_path(reference, config_));
  progress_ = policy == SwapPolicy::kRestart ? 0.0 : nearest_arc_length(reference, state_.p);
  obs_ = observe();
  return obs_;
}

}  // namespace ptrack
