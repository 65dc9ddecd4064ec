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
#include "ptrack/evaluate.hpp"

#include <algorithm>
#include <ostream>

namespace ptrack {

namespace {

struct DeviationAccumulator {
  double sum = 0.0, max = 0.0, last = 0.0;
  long count = 0;

  void add(double d) {
    sum += d;
    max = std::max(max, d);
    last = d;
    ++count;
  }
  DeviationStats stats() const { return {count > 0 ? sum / count : 0.0, max, last}; }
};

struct Comparator {
  const CubicPath& ref;
  const ChainSpec& chain;
  DeviationAccumulator joint, position, orientation;

  void add(const JointVector& q, double arc) {
    const JointVector r = ref.eval(std::min(arc, ref.total_length()));
    joint.add((q - r).norm());
    const Pose a = fk(chain, q);
    const Pose b = fk(chain, r);
    position.add((a.position - b.position).norm());
    orientation.add(rotation_distance(a.orientation, b.orientation));
  }
};

EpisodeReport run_one(const PolicyFn& policy, const PathRecord& record, const RobotLimits& limits,
                      const EnvConfig& config, const ChainSpec& chain) {
  const CubicPath ref = record.path();
  Env env(limits, chain, config);
  Observation obs = env.reset(ref);
  const double total = ref.total_length();
  EpisodeReport rep;
  rep.path_id = record.id;
  Comparator cmp{ref, chain, {}, {}, {}};
  cmp.add(env.state().p, 0.0);
  // Arc length generated so far; the substep polyline as in Env::step.
  double arc = 0.0;
  rep.reached_end = total - env.progress() <= kPathEndTolerance;
  while (!rep.reached_end && !env.done()) {
    const JointVector start = env.state().p;
    const double p0 = env.progress();
    const StepResult r = env.step(policy(obs));
    double seg = 0.0;
    const JointVector* prev = &start;
    for (const Setpoint& sp : r.segment.setpoints) {
      seg += (sp.p - *prev).norm();
      prev = &sp.p;
      cmp.add(sp.p, p0 + seg);
    }
    arc = env.progress();
    ++rep.steps;
    rep.reason = r.reason;
    rep.reached_end = total - env.progress() <= kPathEndTolerance;
    obs = r.obs;
  }
  const std::vector<Segment> braking = brake_to_rest(env.state(), limits, config.dt, config.substeps);
  JointVector prev = env.state().p;
  for (const Segment& s : braking) {
    for (const Setpoint& sp : s.setpoints) {
      arc += (sp.p - prev).norm();
      prev = sp.p;
      cmp.add(sp.p, arc);
    }
  }
  rep.braking_steps = static_cast<int>(braking.size());
  rep.duration = (rep.steps + rep.braking_steps) * config.dt;
  rep.joint = cmp.joint.stats();
  rep.position = cmp.position.stats();
  rep.orientation = cmp.orientation.stats();
  return rep;
}

}  // namespace

EvalReport evaluate(const PolicyFn& policy, const std::vector<PathRecord>& dataset,
                    const RobotLimits& limits, const EnvConfig& config, const ChainSpec& chain,
                    Execution exec) {
  for (const PathRecord& r : dataset) {
    if (r.dim != static_cast<int>(limits.size())) {
      throw PreconditionError("evaluate: path " + r.id + " has " + std::to_string(r.dim) +
                              " joints, robot has " + std::to_string(limits.size()));
    }
  }
  EvalReport report;
  report.episodes.resize(dataset.size());
  for_each_index(dataset.size(), exec, [&](std::size_t i) {
    report.episodes[i] = run_one(policy, dataset[i], limits, config, chain);
  });
  if (report.episodes.empty()) return report;
  EpisodeReport& m = report.mean;
  m.path_id = "mean";
  const auto add = [](DeviationStats& a, const DeviationStats& b) {
    a.mean += b.mean;
    a.max += b.max;
    a.final += b.final;
  };
  const auto scale = [](DeviationStats& a, double f) {
    a.mean *= f;
    a.max *= f;
    a.final *= f;
  };
  for (const EpisodeReport& e : report.episodes) {
    m.duration += e.duration;
    add(m.joint, e.joint);
    add(m.position, e.position);
    add(m.orientation, e.orientation);
    m.steps += e.steps;
    m.braking_steps += e.braking_steps;
    if (e.reached_end) report.reached_end_rate += 1.0;
    if (e.reason == DoneReason::kDeviation) report.deviation_termination_rate += 1.0;
    if (e.reason == DoneReason::kBallDropped) report.ball_drop_rate += 1.0;
  }
  const double f = 1.0 / static_cast<double>(report.episodes.size());
  m.duration *= f;
  scale(m.joint, f);
  scale(m.position, f);
  scale(m.orientation, f);
  report.reached_end_rate *= f;
  report.deviation_termination_rate *= f;
  report.ball_drop_rate *= f;
  return report;
}

EvalReport evaluate(const PolicyParams& params, const std::vector<PathRecord>& dataset,
                    const RobotLimits& limits, const EnvConfig& config, const ChainSpec& chain,
                    Execution exec) {
  check_compatible(params, static_cast<int>(limits.size()), config);
  return evaluate(deterministic_policy(params, limits, config), dataset, limits, config, chain, exec);
}

void write_eval_csv(std::ostream& out, const EvalReport& report) {
  out << kEvalCsvHeader << '\n';
  out.precision(17);
  for (const EpisodeReport& e : report.episodes) {
    out << e.path_id << ',' << e.duration << ',' << e.joint.mean << ',' << e.joint.max << ','
        << e.joint.final << ',' << e.position.mean << ',' << e.position.max << ','
        << e.position.final << ',' << e.orientation.mean << ',' << e.orientation.max << ','
        << e.orientation.final << ',' << to_string(e.reason) << '\n';
  }
}

}  // namespace ptrack
