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
// Command-line entry points: gen-dataset, train, eval, topp, trace.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error. The worker
// count of parallel kernels can be overridden with PTRACK_WORKERS.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptrack/dataset.hpp"
#include "ptrack/evaluate.hpp"
#include "ptrack/parallel.hpp"
#include "ptrack/policy.hpp"
#include "ptrack/robot_config.hpp"
#include "ptrack/topp.hpp"
#include "ptrack/trace.hpp"
#include "ptrack/train.hpp"

namespace {

using namespace ptrack;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::ofstream open_output(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError(file + ": cannot open for writing");
  return out;
}

Task task_from_string(const std::string& name) {
  if (name == "none") return Task::kNone;
  if (name == "ball-beam") return Task::kBallBeam;
  throw ConfigError("task: must be \"none\" or \"ball-beam\", got \"" + name + "\"");
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("hidden: expected comma-separated layer sizes, got \"" + text + "\"");
    }
  }
  if (out.empty()) throw ConfigError("hidden: empty");
  return out;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string robot, kind = "random", out;
  int count = 10;
  std::uint64_t seed = 0;
  int steps = kDefaultRandomSteps;
  int waypoints = kDefaultWaypoints;
  bool level = false;
};

int cmd_gen_dataset(const GenArgs& a) {
  const RobotConfig rc = load_robot_config(a.robot);
  const Generator gen = generator_from_string(a.kind);
  if (a.count < 1) throw ConfigError("count: must be >= 1");
  std::vector<PathRecord> records;
  DatasetManifest m;
  m.master_seed = a.seed;
  m.count = static_cast<std::size_t>(a.count);
  m.generator = gen;
  m.dim = rc.dimension();
  if (gen == Generator::kRandom) {
    if (a.steps < 1) throw ConfigError("steps: must be >= 1");
    RandomPathOptions opt;
    opt.steps_per_path = a.steps;
    opt.dt = rc.env.dt;
    records = gen_random_paths(rc.limits, a.count, a.seed, opt);
    m.steps_or_waypoints = a.steps;
  } else {
    if (a.waypoints < 2) throw ConfigError("waypoints: must be >= 2");
    WaypointOptions opt;
    opt.waypoints_per_path = a.waypoints;
    if (a.level) {
      opt.level_chain = &rc.chain;
      opt.ball = rc.env.ball;
    }
    records = gen_waypoint_paths(rc.limits, a.count, a.seed, opt);
    m.steps_or_waypoints = a.waypoints;
  }
  save_dataset(a.out, records);
  save_manifest(a.out, m);
  std::cout << "wrote " << records.size() << " paths to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string robot, dataset, algo = "cem", task, out, curve, hidden;
  int budget = 100;
  std::uint64_t seed = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  int population = 0;
  int paths_per_iteration = 0;
  int episodes_per_iteration = 0;
  bool quiet = false;
};

EnvConfig env_for(const RobotConfig& rc, const std::string& task, double alpha, double beta,
                  double gamma) {
  EnvConfig env = rc.env;
  if (!task.empty()) env.task = task_from_string(task);
  if (!std::isnan(alpha)) env.reward.alpha = alpha;
  if (!std::isnan(beta)) env.reward.beta = beta;
  if (!std::isnan(gamma)) env.reward.gamma = gamma;
  env.validate("env");
  return env;
}

int cmd_train(const TrainArgs& a) {
  const RobotConfig rc = load_robot_config(a.robot);
  const std::vector<PathRecord> data = load_dataset(a.dataset, rc.dimension());
  if (data.empty()) throw ConfigError(a.dataset + ": dataset is empty");
  const EnvFactory factory{rc.limits, rc.chain, env_for(rc, a.task, a.alpha, a.beta, a.gamma)};
  TrainOptions opt;
  opt.algorithm = algorithm_from_string(a.algo);
  if (a.budget < 0) throw ConfigError("budget: must be >= 0");
  opt.budget = a.budget;
  opt.seed = a.seed;
  if (!a.hidden.empty()) opt.hidden = parse_sizes(a.hidden);
  if (a.population > 0) opt.cem.population = a.population;
  if (a.paths_per_iteration > 0) opt.cem.paths_per_iteration = a.paths_per_iteration;
  if (a.episodes_per_iteration > 0) opt.ppo.episodes_per_iteration = a.episodes_per_iteration;
  const TrainResult res = train(factory, data, opt, [&](const CurvePoint& c) {
    if (!a.quiet) {
      std::cerr << "iteration " << c.iteration << " mean_return " << c.mean_return << "\n";
    }
  });
  save_checkpoint(a.out, res.params);
  const std::string curve = a.curve.empty() ? a.out + ".curve.csv" : a.curve;
  std::ofstream cv = open_output(curve);
  write_curve_csv(cv, res.curve);
  if (res.curve.empty()) {
    std::cout << "final mean return: n/a (budget 0)\n";
  } else {
    std::cout << "final mean return: " << res.curve.back().mean_return << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string ckpt, dataset, robot, report;
};

/// Env config of the robot file with the checkpoint's task.
EnvConfig env_for_checkpoint(const RobotConfig& rc, const PolicyParams& params) {
  EnvConfig env = rc.env;
  env.task = params.task;
  check_compatible(params, rc.dimension(), env);
  return env;
}

int cmd_eval(const EvalArgs& a) {
  const RobotConfig rc = load_robot_config(a.robot);
  const PolicyParams params = load_checkpoint(a.ckpt);
  const EnvConfig env = env_for_checkpoint(rc, params);
  const std::vector<PathRecord> data = load_dataset(a.dataset, rc.dimension());
  const EvalReport rep = evaluate(params, data, rc.limits, env, rc.chain);
  std::ofstream out = open_output(a.report);
  write_eval_csv(out, rep);
  std::cout << "episodes " << rep.episodes.size();
  if (!rep.episodes.empty()) {
    std::cout << " mean_duration " << rep.mean.duration << " joint_mean " << rep.mean.joint.mean
              << " cart_pos_mean " << rep.mean.position.mean << " deviation_terminations "
              << rep.deviation_termination_rate;
  }
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ToppArgs {
  std::string dataset, robot, report, ckpt;
  int grid = 1000;
};

int cmd_topp(const ToppArgs& a) {
  const RobotConfig rc = load_robot_config(a.robot);
  const std::vector<PathRecord> data = load_dataset(a.dataset, rc.dimension());
  std::vector<double> policy_duration(data.size(), std::numeric_limits<double>::quiet_NaN());
  if (!a.ckpt.empty()) {
    const PolicyParams params = load_checkpoint(a.ckpt);
    const EvalReport rep = evaluate(params, data, rc.limits, env_for_checkpoint(rc, params), rc.chain);
    for (std::size_t i = 0; i < data.size(); ++i) policy_duration[i] = rep.episodes[i].duration;
  }
  std::vector<double> topp_duration(data.size());
  for_each_index(data.size(), Execution::kParallel, [&](std::size_t i) {
    topp_duration[i] = backward_forward(data[i].path(), rc.limits, a.grid).duration;
  });
  std::ofstream out = open_output(a.report);
  out << "path_id,K,duration_topp,duration_policy,ratio\n";
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data[i].id << ',' << a.grid << ',' << topp_duration[i] << ',' << policy_duration[i] << ','
        << topp_duration[i] / policy_duration[i] << '\n';
  }
  std::cout << "paths " << data.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TraceArgs {
  std::string ckpt, dataset, robot, path_id, out, format = "json";
};

int cmd_trace(const TraceArgs& a) {
  const RobotConfig rc = load_robot_config(a.robot);
  const PolicyParams params = load_checkpoint(a.ckpt);
  const EnvConfig env_cfg = env_for_checkpoint(rc, params);
  const std::vector<PathRecord> data = load_dataset(a.dataset, rc.dimension());
  const PathRecord* rec = nullptr;
  for (const PathRecord& r : data) {
    if (r.id == a.path_id) rec = &r;
  }
  if (rec == nullptr) throw ConfigError("path-id: \"" + a.path_id + "\" not in " + a.dataset);
  Env env(rc.limits, rc.chain, env_cfg);
  const Trace tr = record_trace(env, rec->path(), rec->id, deterministic_policy(params, rc.limits, env_cfg));
  std::ofstream out = open_output(a.out);
  if (a.format == "json") {
    write_trace_json(out, tr);
  } else if (a.format == "csv") {
    write_trace_csv(out, tr);
  } else {
    throw ConfigError("format: must be \"json\" or \"csv\"");
  }
  std::cout << "steps " << tr.steps.size() << " braking setpoints " << tr.braking.size() << "\n";
  return 0;
}

void apply_worker_override() {
  const char* env = std::getenv("PTRACK_WORKERS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("PTRACK_WORKERS: must be a positive integer");
  set_worker_count(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jerk-limited online trajectory generation: datasets, training, evaluation, TOPP"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen-dataset", "Generate a JSON-lines path dataset and manifest");
  g->add_option("--robot", gen.robot, "Robot config JSON")->required();
  g->add_option("--kind", gen.kind, "random or waypoint");
  g->add_option("--count", gen.count, "Number of paths");
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--out", gen.out, "Output dataset file")->required();
  g->add_option("--steps", gen.steps, "Decision steps per random path");
  g->add_option("--waypoints", gen.waypoints, "Waypoints per waypoint path");
  g->add_flag("--level", gen.level, "Solve the last joint so the beam stays level (waypoint kind)");

  TrainArgs tr;
  CLI::App* t = app.add_subcommand("train", "Train a policy; writes a checkpoint and learning curve");
  t->add_option("--robot", tr.robot, "Robot config JSON")->required();
  t->add_option("--dataset", tr.dataset, "Training dataset")->required();
  t->add_option("--algo", tr.algo, "cem or ppo");
  t->add_option("--task", tr.task, "none or ball-beam (default from the robot config)");
  t->add_option("--budget", tr.budget, "Training iterations");
  t->add_option("--seed", tr.seed, "Seed");
  t->add_option("--out", tr.out, "Checkpoint file")->required();
  t->add_option("--curve", tr.curve, "Learning-curve CSV (default CKPT.curve.csv)");
  t->add_option("--hidden", tr.hidden, "Hidden layer sizes, e.g. 256,128");
  t->add_option("--alpha", tr.alpha, "Path length reward weight");
  t->add_option("--beta", tr.beta, "Path deviation reward weight");
  t->add_option("--gamma", tr.gamma, "Task reward weight");
  t->add_option("--population", tr.population, "CEM population");
  t->add_option("--paths-per-iteration", tr.paths_per_iteration, "CEM paths per candidate");
  t->add_option("--episodes-per-iteration", tr.episodes_per_iteration, "PPO episodes per update");
  t->add_flag("--quiet", tr.quiet, "Do not print per-iteration progress");

  EvalArgs ev;
  CLI::App* e = app.add_subcommand("eval", "Evaluate a checkpoint; writes a per-episode CSV report");
  e->add_option("--ckpt", ev.ckpt, "Checkpoint file")->required();
  e->add_option("--dataset", ev.dataset, "Evaluation dataset")->required();
  e->add_option("--robot", ev.robot, "Robot config JSON")->required();
  e->add_option("--report", ev.report, "Output CSV")->required();

  ToppArgs tp;
  CLI::App* p = app.add_subcommand("topp", "Time-optimal path parameterization baseline report");
  p->add_option("--dataset", tp.dataset, "Dataset")->required();
  p->add_option("--robot", tp.robot, "Robot config JSON")->required();
  p->add_option("--grid", tp.grid, "Number of path stages K");
  p->add_option("--report", tp.report, "Output CSV")->required();
  p->add_option("--ckpt", tp.ckpt, "Checkpoint for the duration_policy column (NaN without)");

  TraceArgs tc;
  CLI::App* c = app.add_subcommand("trace", "Export one evaluation episode with per-substep setpoints");
  c->add_option("--ckpt", tc.ckpt, "Checkpoint file")->required();
  c->add_option("--dataset", tc.dataset, "Dataset holding the path")->required();
  c->add_option("--robot", tc.robot, "Robot config JSON")->required();
  c->add_option("--path-id", tc.path_id, "Path id")->required();
  c->add_option("--out", tc.out, "Output file")->required();
  c->add_option("--format", tc.format, "json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    // Help requests exit with 0.
    return app.exit(err) == 0 ? 0 : kExitConfig;
  }

  try {
    apply_worker_override();
    if (*g) return cmd_gen_dataset(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*p) return cmd_topp(tp);
    if (*c) return cmd_trace(tc);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "runtime error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
