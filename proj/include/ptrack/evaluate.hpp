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

#include "ptrack/dataset.hpp"
#include "ptrack/parallel.hpp"
#include "ptrack/rollout.hpp"

namespace ptrack {

struct DeviationStats {
  double mean = 0.0, max = 0.0, final = 0.0;
};

struct EpisodeReport {
  std::string path_id;
  /// Time until the robot stands still, braking included (s).
  double duration = 0.0;
  DeviationStats joint;        // rad
  DeviationStats position;     // m
  DeviationStats orientation;  // rad
  DoneReason reason = DoneReason::kNone;
  bool reached_end = false;
  int steps = 0;
  int braking_steps = 0;
};

struct EvalReport {
  std::vector<EpisodeReport> episodes;
  /// Means of the per-episode values; the reason field is unused.
  EpisodeReport mean;
  double reached_end_rate = 0.0;
  double deviation_termination_rate = 0.0;
  double ball_drop_rate = 0.0;
};

/// Runs the deterministic policy on every path until the end of the path is
/// within kPathEndTolerance or the episode ends, then brakes to rest.
/// Deviations compare every substep position with the reference point at the
/// same arc length from the path start (clamped to the path end); Cartesian
/// deviations use the reference point of chain. The final deviation is
/// taken at the stopped state.
EvalReport evaluate(const PolicyParams& params, const std::vector<PathRecord>& dataset,
                    const RobotLimits& limits, const EnvConfig& config, const ChainSpec& chain,
                    Execution exec = Execution::kParallel);
/// Same with an arbitrary policy; policy must be safe to call concurrently
/// when exec is kParallel.
EvalReport evaluate(const PolicyFn& policy, const std::vector<PathRecord>& dataset,
                    const RobotLimits& limits, const EnvConfig& config, const ChainSpec& chain,
                    Execution exec = Execution::kParallel);

/// One row per episode; only the header for an empty report.
void write_eval_csv(std::ostream& out, const EvalReport& report);
inline constexpr const char* kEvalCsvHeader =
    "path_id,duration,joint_mean,joint_max,joint_final,cart_pos_mean,cart_pos_max,"
    "cart_pos_final,cart_orient_mean,cart_orient_max,cart_orient_final,termination";

}  // namespace ptrack
