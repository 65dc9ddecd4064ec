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
#include <optional>
#include <string>
#include <vector>

#include "ptrack/env.hpp"
#include "ptrack/rollout.hpp"

namespace ptrack {

struct TraceStep {
  double t = 0.0;  // time at the end of the step (s)
  JointVector action;
  JointVector a_next;
  KinematicState state;  // after the step
  double progress = 0.0;
  RewardBreakdown reward;
  DoneReason reason = DoneReason::kNone;
  std::optional<BallState> ball;
  std::vector<Setpoint> setpoints;  // times relative to the episode start
};

/// One evaluation episode, as run by evaluate(): steps until the end of the
/// path is reached or the episode ends, then braking to rest.
struct Trace {
  std::string path_id;
  double dt = 0.0;
  int substeps = 0;
  KinematicState start;
  std::vector<TraceStep> steps;
  std::vector<Setpoint> braking;
};

Trace record_trace(Env& env, const CubicPath& path, const std::string& path_id,
                   const PolicyFn& policy);

void write_trace_json(std::ostream& out, const Trace& trace);
Trace read_trace_json(std::istream& in, const std::string& name = "trace");
/// Step rows: t, action, a', p, v, a per joint, then progress, l, d, r_l,
/// r_d, r_s, total, done_reason.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Re-runs the recorded actions through env on path and brakes to rest.
/// Returns the final stopped state.
KinematicState replay_trace(Env& env, const CubicPath& path, const Trace& trace);

}  // namespace ptrack
