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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ptrack/env.hpp"
#include "ptrack/rng.hpp"
#include "test_oracles.hpp"

namespace ptrack {
namespace {

JointLimits joint(double p_lo = -3.0, double p_hi = 3.0) {
  return {p_lo, p_hi, -1.5, 1.5, -5.0, 5.0, -40.0, 40.0};
}

JointVector vec(std::initializer_list<double> v) {
  JointVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ChainSpec planar_chain(int n) {
  ChainSpec c;
  for (int i = 0; i < n; ++i) c.joints.push_back({Eigen::Vector3d::UnitY(), Eigen::Vector3d(0.3, 0, 0)});
  return c;
}

Env make_env(int dim, EnvConfig cfg = {}) {
  return Env(RobotLimits(static_cast<std::size_t>(dim), joint()), planar_chain(dim), cfg);
}

TEST(Reward, LengthAnchorsAndShape) {
  RewardConfig cfg;
  cfg.l_end = 0.7;
  const double ls = 1.3;
  EXPECT_EQ(reward_length(0.0, ls, cfg), 0.0);
  EXPECT_EQ(reward_length(ls, ls, cfg), 1.0);
  EXPECT_EQ(reward_length(ls + cfg.l_end, ls, cfg), 0.0);
  EXPECT_EQ(reward_length(ls / 2.0, ls, cfg), 0.25);
  EXPECT_EQ(reward_length(ls + 2.0 * cfg.l_end, ls, cfg), 0.0);
  // Degenerate window at the end of the path.
  EXPECT_EQ(reward_length(0.0, 0.0, cfg), 1.0);
  EXPECT_NEAR(reward_length(0.35, 0.0, cfg), 0.25, 1e-15);
  EXPECT_EQ(reward_length(0.7, 0.0, cfg), 0.0);
  EXPECT_EQ(reward_length(5.0, 0.0, cfg), 0.0);
}

TEST(Reward, DeviationAnchorsAndShape) {
  RewardConfig cfg;
  EXPECT_EQ(reward_deviation(0.0, cfg), 1.0);
  EXPECT_EQ(reward_deviation(cfg.d_max, cfg), 0.0);
  EXPECT_EQ(reward_deviation(cfg.d_max / 2.0, cfg), 0.25);
  EXPECT_EQ(reward_deviation(3.0 * cfg.d_max, cfg), 0.0);
}

TEST(Reward, Monotone) {
  RewardConfig cfg;
  const double ls = 0.9;
  double prev_l = -1.0, prev_d = 2.0;
  for (int i = 0; i <= 10000; ++i) {
    const double l = ls * i / 10000.0;
    const double r = reward_length(l, ls, cfg);
    EXPECT_GE(r, prev_l);
    prev_l = r;
    const double rd = reward_deviation(cfg.d_max * i / 10000.0, cfg);
    EXPECT_LE(rd, prev_d);
    prev_d = rd;
  }
  prev_l = 2.0;
  for (int i = 0; i <= 10000; ++i) {
    const double r = reward_length(ls + cfg.l_end * i / 10000.0, ls, cfg);
    EXPECT_LE(r, prev_l);
    prev_l = r;
  }
}

TEST(Reward, WeightedTotal) {
  RewardConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 1.0;
  cfg.gamma = 0.0;
  EXPECT_EQ(reward_total(0.5, 0.5, 0.7, cfg).total, 1.0);
  cfg.alpha = cfg.beta = cfg.gamma = 0.0;
  EXPECT_EQ(reward_total(0.5, 0.5, 0.7, cfg).total, 0.0);
  cfg.alpha = 1.0;
  cfg.beta = 2.0;
  cfg.gamma = 1.0;
  EXPECT_EQ(reward_total(1, 1, 1, cfg).total, 4.0);
}

TEST(Config, ValidationNamesField) {
  EnvConfig cfg;
  cfg.reward.d_max = 0.0;
  try {
    cfg.validate("robot.env");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "robot.env.reward.d_max: must be > 0");
  }
}

std::vector<JointVector> line_knots(int count, int dim) {
  std::vector<JointVector> knots;
  for (int i = 0; i < count; ++i) {
    JointVector q = JointVector::Zero(dim);
    q[0] = 0.25 * i;
    if (dim > 1) q[1] = 0.3 * std::sin(0.8 * i);
    knots.push_back(q);
  }
  return knots;
}

TEST(Env, ResetPlacesRobotAtPathStart) {
  EnvConfig cfg;
  cfg.n_knots = 5;
  cfg.sampling = KnotSampling::kDistance;
  Env env = make_env(2, cfg);
  const CubicPath path = build_path(line_knots(10, 2));
  const Observation obs = env.reset(path);
  EXPECT_EQ(obs.window.start_index, 0u);
  EXPECT_EQ(obs.window.offset, 0.0);
  EXPECT_EQ(obs.window.knots.size(), 5u);
  EXPECT_EQ(obs.kin.p, path.eval(0.0));
  EXPECT_EQ(obs.kin.v, JointVector::Zero(2));
  EXPECT_NEAR(obs.window.l_state, env.state_knot_arcs()[4], 1e-15);
  const double spacing = path.total_length() / (env.state_knot_arcs().size() - 1);
  EXPECT_LE(spacing, cfg.knot_spacing);

  const Observation again = env.reset(path);
  EXPECT_EQ(again.kin.p, obs.kin.p);
  EXPECT_EQ(again.window.l_state, obs.window.l_state);
  for (std::size_t k = 0; k < obs.window.knots.size(); ++k) {
    EXPECT_EQ(again.window.knots[k], obs.window.knots[k]);
  }
}

TEST(Env, ResetRejectsBadInput) {
  Env env = make_env(2);
  EXPECT_THROW(env.reset(build_path(line_knots(4, 3))), PreconditionError);
  KinematicState bad = KinematicState::at_rest(JointVector::Zero(2));
  bad.v[0] = 10.0;
  EXPECT_THROW(env.reset(build_path(line_knots(4, 2)), bad), PreconditionError);
}

TEST(Env, ZeroLengthPathPenalizesMotion) {
  Env env = make_env(1);
  const CubicPath still = build_path({vec({0.2}), vec({0.2})}, Parameterization::kUniform);
  env.reset(still);
  EXPECT_EQ(env.observation().window.l_state, 0.0);
  double prev = 2.0;
  for (int i = 0; i < 4; ++i) {
    const StepResult r = env.step(Action{vec({1.0})});
    EXPECT_GT(r.reward.l, 0.0);
    EXPECT_NEAR(r.reward.r_l, reward_length(r.reward.l, 0.0, env.config().reward), 0.0);
    EXPECT_LT(r.reward.r_l, prev);
    prev = r.reward.r_l;
  }
}

// Scripted oracle: a profile that never moves backward and stops exactly at
// the path end.
TEST(Env, StraightPathTrackingHasZeroDeviation) {
  EnvConfig cfg;
  cfg.max_steps = 60;
  Env env = make_env(1, cfg);
  const CubicPath path = build_path({vec({-1.0}), vec({0.0}), vec({2.0})});
  env.reset(path);
  const std::vector<double> script = oracle::line_profile(3.0, joint(), cfg.dt);
  ASSERT_LT(script.size(), 60u);
  double prev_progress = 0.0;
  for (std::size_t k = 0; !env.done(); ++k) {
    const double x = k < script.size() ? script[k] : 0.0;
    const AccelRange range = feasible_range(env.state(), env.limits(), cfg.dt);
    const StepResult r = env.step(unmap_action(vec({x}), range));
    EXPECT_NEAR(env.state().a[0], x, 1e-12);
    EXPECT_LE(r.reward.d, 1e-6);
    EXPECT_NEAR(r.reward.r_d, 1.0, 1e-5);
    EXPECT_GE(r.obs.progress, prev_progress);
    prev_progress = r.obs.progress;
  }
  EXPECT_NEAR(env.progress(), path.total_length(), 1e-6);
  EXPECT_TRUE(env.state().v.isZero(1e-9));
}

TEST(Env, RandomActionsTerminateOnDeviation) {
  EnvConfig cfg;
  cfg.termination_deviation = 0.2;
  cfg.reward.d_max = 0.1;
  cfg.max_steps = 200;
  Env env = make_env(3, cfg);
  std::vector<JointVector> knots;
  for (const auto& c : oracle::circle_knots(12, 1.0)) knots.push_back(vec({c[0], c[1], 0.5 * c[0]}));
  const CubicPath path = build_path(knots);
  Rng rng(3);
  int early = 0;
  for (int episode = 0; episode < 30; ++episode) {
    Observation obs = env.reset(path);
    std::size_t obs_knots = obs.window.knots.size();
    int steps = 0;
    while (!env.done()) {
      JointVector a(3);
      for (int j = 0; j < 3; ++j) a[j] = rng.uniform(-1.0, 1.0);
      const double before = env.progress();
      const StepResult r = env.step(Action{a});
      ++steps;
      const bool expect_done = r.reward.d > cfg.termination_deviation || steps == cfg.max_steps;
      EXPECT_EQ(r.done, expect_done);
      if (r.reason == DoneReason::kDeviation) {
        EXPECT_GT(r.reward.d, cfg.termination_deviation);
        ++early;
      }
      EXPECT_GE(r.obs.progress, before);
      EXPECT_LE(r.obs.progress, path.total_length());
      EXPECT_GE(r.reward.total, 0.0);
      for (double x : {r.reward.r_l, r.reward.r_d, r.reward.r_s}) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
      EXPECT_EQ(r.obs.window.knots.size(), obs_knots);
      EXPECT_TRUE(r.obs.kin.p.allFinite() && std::isfinite(r.obs.window.l_state));
      EXPECT_GT(r.reward.d, 0.0);
    }
    EXPECT_THROW(env.step(Action{JointVector::Zero(3)}), PreconditionError);
  }
  EXPECT_GT(early, 0);
}

TEST(Env, RejectsNonFiniteAction) {
  Env env = make_env(2);
  env.reset(build_path(line_knots(5, 2)));
  EXPECT_THROW(env.step(Action{vec({0.0, std::nan("")})}), PreconditionError);
}

TEST(Env, DeterministicSetpoints) {
  const CubicPath path = build_path(line_knots(8, 2));
  std::vector<std::vector<double>> runs[2];
  for (auto& run : runs) {
    Env env = make_env(2);
    env.reset(path);
    Rng rng(99);
    while (!env.done()) {
      const StepResult r = env.step(Action{vec({rng.uniform(-1, 1), rng.uniform(-1, 1)})});
      for (const auto& sp : r.segment.setpoints) run.push_back({sp.p[0], sp.p[1], sp.v[0], sp.a[1]});
      run.push_back({r.reward.total, r.reward.d, r.obs.progress});
    }
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST(Env, SubstepRefinementChangesDeviationLittle) {
  const CubicPath path = build_path(line_knots(8, 2));
  double mean_d[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    EnvConfig cfg;
    cfg.substeps = k == 0 ? 10 : 20;
    cfg.max_steps = 30;
    cfg.termination_deviation = 10.0;
    Env env = make_env(2, cfg);
    env.reset(path);
    Rng rng(5);
    int n = 0;
    while (!env.done()) {
      mean_d[k] += env.step(Action{vec({rng.uniform(-1, 1), rng.uniform(-1, 1)})}).reward.d;
      ++n;
    }
    mean_d[k] /= n;
  }
  EXPECT_LT(std::abs(mean_d[0] - mean_d[1]) / mean_d[1], 0.01);
}

TEST(Env, SwapUsesNearestPointOrRestarts) {
  Env env = make_env(2);
  const CubicPath path = build_path(line_knots(8, 2));
  env.reset(path);
  for (int i = 0; i < 8; ++i) env.step(Action{vec({0.6, 0.6})});
  const Observation o = env.swap_path(path, SwapPolicy::kKeepProgressByNearest);
  const double expected = nearest_arc_length(path, env.state().p);
  EXPECT_NEAR(o.progress, expected, 1e-12);
  EXPECT_EQ(env.swap_path(path, SwapPolicy::kRestart).progress, 0.0);
}

TEST(Env, SwapOnTrackKeepsProgressAndTranslatedPathShiftsDeviation) {
  Env env = make_env(2);
  const CubicPath path = build_path({vec({0.0, 0.0}), vec({1.0, 0.0}), vec({2.0, 0.0})});
  env.reset(path);
  for (int i = 0; i < 6; ++i) env.step(Action{vec({1.0, 0.0})});
  const double before = env.progress();
  EXPECT_NEAR(env.swap_path(path, SwapPolicy::kKeepProgressByNearest).progress, before,
              1e-6 * path.total_length());
  const double delta = 0.05;
  const CubicPath shifted = build_path({vec({0.0, delta}), vec({1.0, delta}), vec({2.0, delta})});
  env.swap_path(shifted, SwapPolicy::kKeepProgressByNearest);
  EXPECT_NEAR(env.progress(), before, 1e-6 * path.total_length());
  const StepResult r = env.step(Action{vec({1.0, 0.0})});
  EXPECT_NEAR(r.reward.d, delta, 1e-6);
}

TEST(NearestArcLength, MatchesDenseScan) {
  const CubicPath path = build_path(oracle::lemniscate_knots(21));
  Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const JointVector q = vec({rng.uniform(-1.2, 1.2), rng.uniform(-0.6, 0.6)});
    const double s = nearest_arc_length(path, q);
    double best = 1e300;
    for (int g = 0; g <= 200000; ++g) {
      best = std::min(best, (path.eval(path.total_length() * g / 200000.0) - q).norm());
    }
    EXPECT_LE((path.eval(s) - q).norm(), best + 1e-9);
  }
}

TEST(BallBeam, NoForcingKeepsBallStill) {
  BallBeamConfig cfg;
  const BallState s = ball_beam_step({0.1, 0.0}, 0.0, 1.0, 10, cfg);
  EXPECT_EQ(s.b, 0.1);
  EXPECT_EQ(s.bdot, 0.0);
  EXPECT_EQ(ball_reward(0.0, cfg), 1.0);
  EXPECT_EQ(ball_reward(cfg.half_length, cfg), 0.0);
  EXPECT_EQ(ball_reward(-2.0 * cfg.half_length, cfg), 0.0);
}

TEST(BallBeam, ConstantTiltMatchesFineIntegration) {
  BallBeamConfig cfg;
  cfg.half_length = 100.0;
  const BallState s = ball_beam_step({}, 0.1, 1.0, 10, cfg);
  // Semi-implicit Euler with 1e5 steps.
  double b = 0.0, bd = 0.0;
  const double h = 1e-5;
  for (int i = 0; i < 100000; ++i) {
    bd += -9.81 * std::sin(0.1) * h;
    b += bd * h;
  }
  EXPECT_NEAR(s.b, b, 0.01 * std::abs(b));
  EXPECT_NEAR(s.b, -0.5 * 9.81 * std::sin(0.1), 1e-12);
}

TEST(BallBeam, TiltFollowsLastLink) {
  const ChainSpec chain = planar_chain(3);
  BallBeamConfig cfg;
  EXPECT_NEAR(beam_tilt(chain, vec({0, 0, 0}), cfg), 0.0, 1e-15);
  // Rotating about +y by a positive angle tips the x axis downward.
  EXPECT_NEAR(beam_tilt(chain, vec({0.1, 0.05, 0.05}), cfg), -0.2, 1e-12);
}

TEST(Env, BallBeamTaskAddsFeedbackAndDrops) {
  EnvConfig cfg;
  cfg.task = Task::kBallBeam;
  cfg.reward.gamma = 1.0;
  cfg.max_steps = 200;
  cfg.termination_deviation = 10.0;
  Env env = make_env(3, cfg);
  // The path tilts the beam steadily, so the ball eventually falls off.
  const CubicPath path = build_path({vec({0, 0, 0}), vec({0.3, 0.2, 0.2}), vec({0.6, 0.4, 0.4})});
  const Observation obs = env.reset(path);
  ASSERT_EQ(obs.feedback.size(), 2u);
  EXPECT_EQ(obs.feedback[0], 0.0);
  DoneReason reason = DoneReason::kNone;
  while (!env.done()) {
    const StepResult r = env.step(Action{vec({0.3, 0.3, 0.3})});
    ASSERT_TRUE(r.ball.has_value());
    if (!r.done) {
      EXPECT_EQ(r.reward.r_s, ball_reward(r.ball->b, cfg.ball));
    } else {
      reason = r.reason;
    }
  }
  EXPECT_EQ(reason, DoneReason::kBallDropped);
  EXPECT_GT(std::abs(env.ball().b), cfg.ball.half_length);
}

}  // namespace
}  // namespace ptrack
