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
#include <vector>

#include <Eigen/Core>

#include "ptrack/env.hpp"
#include "ptrack/mlp.hpp"
#include "ptrack/rng.hpp"

namespace ptrack {

inline const std::vector<int> kDefaultHiddenSizes{256, 128};

/// Length of the feature vector for D joints, N knots and the given task.
int observation_size(int dimension, int n_knots, Task task);

/// Normalized network input:
///   window knots relative to the current position, divided by the window
///   length scale (n_knots - 1) * knot_spacing;
///   l_state and offset divided by the same scale;
///   positions mapped to [-1, 1] over the position range;
///   velocities and accelerations divided by their largest magnitude limit;
///   ball-beam feedback as b / half_length and b' / sqrt(g * half_length).
Eigen::VectorXd observation_features(const Observation& obs, const RobotLimits& limits,
                                     const EnvConfig& config);

/// Policy network plus exploration noise.
struct PolicyParams {
  Mlp net;
  /// Log standard deviation of the pre-squash Gaussian, one per joint.
  Eigen::VectorXd log_std;
  Task task = Task::kNone;
  int n_knots = 0;

  int obs_dim() const { return net.input_dim(); }
  int action_dim() const { return net.output_dim(); }
  bool finite() const;

  static PolicyParams initial(int dimension, const EnvConfig& config, Rng& rng,
                              const std::vector<int>& hidden = kDefaultHiddenSizes,
                              double log_std = -0.5);
};

/// Throws ConfigError when params were built for another robot dimension,
/// knot count or task.
void check_compatible(const PolicyParams& params, int dimension, const EnvConfig& config);

/// Deterministic: tanh(net(features)). Stochastic: Gaussian noise with
/// exp(log_std) is added before the tanh; rng must then be non-null.
Action act(const PolicyParams& params, const Eigen::VectorXd& features, bool stochastic,
           Rng* rng);
Action act(const PolicyParams& params, const Observation& obs, const RobotLimits& limits,
           const EnvConfig& config, bool stochastic, Rng* rng);

/// Log density of the pre-squash sample under N(mean, exp(log_std)^2).
double gaussian_log_prob(const Eigen::VectorXd& pre, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std);

inline constexpr int kCheckpointVersion = 1;

/// JSON checkpoint holding metadata (version, obs_dim, action_dim, task,
/// n_knots), the layer shapes with their weights, and log_std.
void save_checkpoint(const std::string& file, const PolicyParams& params);
PolicyParams load_checkpoint(const std::string& file);
void write_checkpoint(std::ostream& out, const PolicyParams& params);
PolicyParams read_checkpoint(std::istream& in, const std::string& name = "checkpoint");

}  // namespace ptrack
