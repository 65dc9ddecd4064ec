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
#include "ptrack/rollout.hpp"

namespace ptrack {

EpisodeSummary run_episode(Env& env, const CubicPath& path, const PolicyFn& policy, bool audit) {
  return run_episode(env, prepare_path(path, env.config()), policy, audit);
}

PreparedPaths prepare_paths(const std::vector<CubicPath>& paths, const EnvConfig& config,
                            Execution exec) {
  PreparedPaths out(paths.size());
  for_each_index(paths.size(), exec, [&](std::size_t i) { out[i] = prepare_path(paths[i], config); });
  return out;
}

EpisodeSummary run_episode(Env& env, std::shared_ptr<const PreparedPath> path,
                           const PolicyFn& policy, bool audit) {
  EpisodeSummary out;
  const double total = path->path.total_length();
  Observation obs = env.reset(std::move(path));
  double dev_sum = 0.0;
  if (total - env.progress() <= kPathEndTolerance) out.reached_end = true;
  while (!env.done()) {
    const KinematicState before = env.state();
    const StepResult r = env.step(policy(obs));
    if (audit) {
      const auto fine = integrate_segment(before, r.a_next, env.config().dt, kAuditSubsteps);
      out.violations += count_violations(fine.first, env.limits());
    }
    out.ret += r.reward.total;
    dev_sum += r.reward.d;
    ++out.steps;
    if (!out.reached_end && total - env.progress() <= kPathEndTolerance) {
      out.reached_end = true;
      out.time_to_end = env.time();
    }
    out.reason = r.reason;
    obs = r.obs;
  }
  if (!out.reached_end) out.time_to_end = env.time();
  out.mean_deviation = out.steps > 0 ? dev_sum / out.steps : 0.0;
  return out;
}

PolicyFn deterministic_policy(const PolicyParams& params, const RobotLimits& limits,
                              const EnvConfig& config) {
  return [&params, &limits, &config](const Observation& obs) {
    return act(params, obs, limits, config, false, nullptr);
  };
}

std::vector<EpisodeSummary> run_episodes(const EnvFactory& factory,
                                         const std::vector<CubicPath>& paths,
                                         const PolicyParams& params, Execution exec,
                                         int audit_every) {
  return run_episodes(factory, prepare_paths(paths, factory.config, exec), params, exec, audit_every);
}

std::vector<EpisodeSummary> run_episodes(const EnvFactory& factory, const PreparedPaths& paths,
                                         const PolicyParams& params, Execution exec,
                                         int audit_every) {
  check_compatible(params, factory.dimension(), factory.config);
  std::vector<EpisodeSummary> out(paths.size());
  for_each_index(paths.size(), exec, [&](std::size_t i) {
    Env env = factory.make();
    const bool audit = audit_every > 0 && i % static_cast<std::size_t>(audit_every) == 0;
    out[i] = run_episode(env, paths[i], deterministic_policy(params, factory.limits, factory.config),
                         audit);
  });
  return out;
}

SummaryStats summarize(const std::vector<EpisodeSummary>& episodes) {
  SummaryStats s;
  if (episodes.empty()) return s;
  for (const EpisodeSummary& e : episodes) {
    s.mean_return += e.ret;
    s.mean_duration += e.time_to_end;
    s.mean_deviation += e.mean_deviation;
    if (e.reason == DoneReason::kDeviation) s.deviation_termination_rate += 1.0;
    if (e.reason == DoneReason::kBallDropped) s.ball_drop_rate += 1.0;
    s.violations += e.violations;
  }
  const double n = static_cast<double>(episodes.size());
  s.mean_return /= n;
  s.mean_duration /= n;
  s.mean_deviation /= n;
  s.deviation_termination_rate /= n;
  s.ball_drop_rate /= n;
  return s;
}

}  // namespace ptrack
