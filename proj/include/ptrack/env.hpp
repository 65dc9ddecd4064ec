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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ptrack/kinematics.hpp"
#include "ptrack/limits.hpp"
#include "ptrack/spline.hpp"

namespace ptrack {

enum class Task { kNone, kBallBeam };
enum class SwapPolicy { kKeepProgressByNearest, kRestart };
enum class DoneReason { kNone, kMaxSteps, kDeviation, kBallDropped };

const char* to_string(DoneReason reason);
const char* to_string(Task task);
const char* to_string(KnotSampling sampling);

struct RewardConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double l_end = 0.5;  // rad
  double d_max = 0.4;  // rad

  void validate(const std::string& context = "reward") const;
};

struct BallBeamConfig {
  double half_length = 0.5;  // m
  double gravity = 9.81;     // m/s^2
  /// Beam direction in the last chain frame.
  Eigen::Vector3d beam_axis = Eigen::Vector3d::UnitX();
  /// World up direction.
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();

  void validate(const std::string& context = "ball_beam") const;
};

struct EnvConfig {
  double dt = 0.1;  // decision interval (s)
  int n_knots = 9;
  KnotSampling sampling = KnotSampling::kCurvature;
  /// Target arc length between state knots; the reference is resampled to
  /// ceil(L / knot_spacing) + 1 knots.
  double knot_spacing = 0.3;
  RewardConfig reward;
  double termination_deviation = 0.8;  // rad
  int max_steps = 100;
  int substeps = 10;
  Task task = Task::kNone;
  BallBeamConfig ball;

  void validate(const std::string& context = "env") const;
};

struct Observation {
  KnotWindow window;
  KinematicState kin;
  /// Task feedback: ball position (m) and velocity (m/s) for the ball beam.
  std::vector<double> feedback;
  double progress = 0.0;
};

struct RewardBreakdown {
  double r_l = 0.0, r_d = 0.0, r_s = 0.0;
  double total = 0.0;
  double l = 0.0;  // generated arc length (rad)
  double d = 0.0;  // mean deviation (rad)
};

double reward_length(double l, double l_state, const RewardConfig& cfg);
double reward_deviation(double d, const RewardConfig& cfg);
RewardBreakdown reward_total(double r_l, double r_d, double r_s, const RewardConfig& cfg);

struct BallState {
  double b = 0.0;     // m, 0 = beam center
  double bdot = 0.0;  // m/s
};

/// Frictionless ball on a beam held at a constant tilt for dt.
BallState ball_beam_step(const BallState& state, double beam_angle, double dt, int substeps,
                         const BallBeamConfig& cfg);
/// Quadratic centering reward in [0, 1].
double ball_reward(double b, const BallBeamConfig& cfg);
/// Beam elevation above the horizontal (rad); positive makes the ball roll
/// toward negative b.
double beam_tilt(const ChainSpec& chain, const JointVector& q, const BallBeamConfig& cfg);

struct StepResult {
  Observation obs;
  RewardBreakdown reward;
  bool done = false;
  DoneReason reason = DoneReason::kNone;
  Action action;
  JointVector a_next;
  Segment segment;
  std::optional<BallState> ball;
};

/// A reference path with the state knots an Env samples from it. Preparing
/// once and resetting many times avoids resampling the knots per episode.
struct PreparedPath {
  CubicPath path;
  std::vector<JointVector> knots;
  std::vector<double> arcs;
  double knot_spacing = 0.0;
  KnotSampling sampling = KnotSampling::kDistance;
};

/// Samples max(2, ceil(L / knot_spacing) + 1) state knots from path.
std::shared_ptr<const PreparedPath> prepare_path(const CubicPath& path, const EnvConfig& config);

/// One episode of reference path tracking. Single-threaded; independent
/// instances share nothing.
class Env {
 public:
  /// `chain` is only queried for the ball-beam task.
  Env(RobotLimits limits, ChainSpec chain, EnvConfig config);

  Observation reset(const CubicPath& reference);
  Observation reset(const CubicPath& reference, const KinematicState& start);
  /// Throws PreconditionError when reference was prepared with another
  /// knot spacing or sampling strategy.
  Observation reset(std::shared_ptr<const PreparedPath> reference);
  Observation reset(std::shared_ptr<const PreparedPath> reference, const KinematicState& start);
  StepResult step(const Action& action);
  Observation swap_path(const CubicPath& reference, SwapPolicy policy);

  const EnvConfig& config() const { return config_; }
  const RobotLimits& limits() const { return limits_; }
  const ChainSpec& chain() const { return chain_; }
  int dimension() const { return static_cast<int>(limits_.size()); }
  int feedback_dimension() const { return config_.task == Task::kBallBeam ? 2 : 0; }

  const CubicPath& reference() const { return reference_->path; }
  const KinematicState& state() const { return state_; }
  const Observation& observation() const { return obs_; }
  const std::vector<double>& state_knot_arcs() const { return reference_->arcs; }
  double progress() const { return progress_; }
  double time() const { return steps_ * config_.dt; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  const BallState& ball() const { return ball_; }

 private:
  void set_reference(std::shared_ptr<const PreparedPath> reference);
  Observation observe() const;

  RobotLimits limits_;
  ChainSpec chain_;
  EnvConfig config_;
  std::shared_ptr<const PreparedPath> reference_;
  KinematicState state_;
  Observation obs_;
  BallState ball_;
  double progress_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
};

/// Arc length of the point on `path` nearest to `q`, from a grid search with
/// golden-section refinement.
double nearest_arc_length(const CubicPath& path, const JointVector& q);

}  // namespace ptrack
