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
// Serial reference kernels against their OpenMP twins.

#include <benchmark/benchmark.h>

#include "ptrack/dataset.hpp"
#include "ptrack/evaluate.hpp"
#include "ptrack/robot_config.hpp"
#include "ptrack/rollout.hpp"

namespace {

using namespace ptrack;

const RobotConfig& arm() {
  static const RobotConfig rc = load_robot_config(PTRACK_CONFIG_DIR "/arm3.json");
  return rc;
}

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_GenRandomPaths(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_random_paths(arm().limits, 64, 1, {}, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_RunEpisodes(benchmark::State& state) {
  const RobotConfig& rc = arm();
  const EnvFactory factory{rc.limits, rc.chain, rc.env};
  std::vector<CubicPath> curves;
  for (const PathRecord& r : gen_random_paths(rc.limits, 32, 2)) curves.push_back(r.path());
  const PreparedPaths paths = prepare_paths(curves, rc.env);
  Rng rng(3);
  const PolicyParams params = PolicyParams::initial(rc.dimension(), rc.env, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_episodes(factory, paths, params, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_Evaluate(benchmark::State& state) {
  const RobotConfig& rc = arm();
  const std::vector<PathRecord> data = gen_random_paths(rc.limits, 16, 4);
  Rng rng(5);
  const PolicyParams params = PolicyParams::initial(rc.dimension(), rc.env, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(params, data, rc.limits, rc.env, rc.chain, mode(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_GenRandomPaths)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunEpisodes)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
