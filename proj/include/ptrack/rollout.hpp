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

#include <functional>
#include <vector>

#include "ptrack/env.hpp"
#include "ptrack/parallel.hpp"
#include "ptrack/policy.hpp"

namespace ptrack {

/// Everything needed to build independent Env instances.
struct EnvFactory {
  RobotLimits limits;
  ChainSpec chain;
  EnvConfig config;

  Env make() const { return Env(limits, chain, config); }
  int dimension() const { return static_cast<int>(limits.size()); }
};

using PolicyFn = std::function<Action(const Observation&)>;

/// Remaining arc length (rad) below which the end of the path counts as
/// reached.
inline constexpr double kPathEndTolerance = 1e-2;
/// Substeps used when auditing rollouts against the joint limits.
inline constexpr int kAuditSubsteps = 100;

struct EpisodeSummary {
  double ret = 0.0;
  int steps = 0;
  DoneReason reason = DoneReason::kNone;
  /// Mean over steps of the step deviation d.
  double mean_deviation = 0.0;
  bool reached_end = false;
  /// Time at which the end was first reached, or the episode length.
  double time_to_end = 0.0;
  /// Limit violations of the intervals re-integrated at kAuditSubsteps;
  /// only counted for audited episodes.
  int violations = 0;
};

/// Runs one full episode of env on path.
EpisodeSummary run_episode(Env& env, std::shared_ptr<const PreparedPath> path,
                           const PolicyFn& policy, bool audit = false);
EpisodeSummary run_episode(Env& env, const CubicPath& path, const PolicyFn& policy,
                           bool audit = false);

using PreparedPaths = std::vector<std::shared_ptr<const PreparedPath>>;
PreparedPaths prepare_paths(const std::vector<CubicPath>& paths, const EnvConfig& config,
                            Execution exec = Execution::kParallel);

PolicyFn deterministic_policy(const PolicyParams& params, const RobotLimits& limits,
                              const EnvConfig& config);

/// Deterministic episodes of params on every path. Every audit_every-th
/// episode (none when 0) is audited.
std::vector<EpisodeSummary> run_episodes(const EnvFactory& factory, const PreparedPaths& paths,
                                         const PolicyParams& params, Execution exec,
                                         int audit_every = 0);
std::vector<EpisodeSummary> run_episodes(const EnvFactory& factory,
                                         const std::vector<CubicPath>& paths,
                                         const PolicyParams& params, Execution exec,
                                         int audit_every = 0);

struct SummaryStats {
  double mean_return = 0.0;
  double mean_duration = 0.0;
  double mean_deviation = 0.0;
  double deviation_termination_rate = 0.0;
  double ball_drop_rate = 0.0;
  int violations = 0;
};
SummaryStats summarize(const std::vector<EpisodeSummary>& episodes);

}  // namespace ptrack
