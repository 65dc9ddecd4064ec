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
#include "ptrack/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ptrack/rng.hpp"

namespace ptrack {

using nlohmann::json;

const char* to_string(Generator generator) {
  return generator == Generator::kWaypoint ? "waypoint" : "random";
}

Generator generator_from_string(const std::string& name) {
  if (name == "random") return Generator::kRandom;
  if (name == "waypoint") return Generator::kWaypoint;
  throw ConfigError("generator: unknown kind '" + name + "' (expected random or waypoint)");
}

bool PathRecord::operator==(const PathRecord& other) const {
  if (id != other.id || dim != other.dim || generator != other.generator || seed != other.seed ||
      knots.size() != other.knots.size()) {
    return false;
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i] != other.knots[i]) return false;
  }
  return true;
}

namespace {

constexpr int kLevelCheckSamples = 200;
constexpr int kMaxLevelAttempts = 1000;

std::string record_id(Generator g, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", g == Generator::kRandom ? "rnd" : "wpt", index);
  return buf;
}

JointVector random_box_point(const RobotLimits& limits, Rng& rng) {
  JointVector q(static_cast<Eigen::Index>(limits.size()));
  for (std::size_t j = 0; j < limits.size(); ++j) {
    const double span = limits[j].p_max - limits[j].p_min;
    q[static_cast<Eigen::Index>(j)] =
        rng.uniform(limits[j].p_min + kBoxMargin * span, limits[j].p_max - kBoxMargin * span);
  }
  return q;
}

void push_distinct(std::vector<JointVector>& knots, const JointVector& q) {
  if (knots.empty() || (q - knots.back()).norm() >= kKnotDedupDistance) knots.push_back(q);
}

std::vector<JointVector> random_rollout_knots(const RobotLimits& limits, int steps, double dt,
                                               Rng& rng) {
  KinematicState state = KinematicState::at_rest(random_box_point(limits, rng));
  std::vector<JointVector> knots = {state.p};
  const Eigen::Index dim = static_cast<Eigen::Index>(limits.size());
  for (int t = 0; t < steps; ++t) {
    JointVector raw(dim);
    for (Eigen::Index j = 0; j < dim; ++j) raw[j] = rng.uniform(-1.0, 1.0);
    const JointVector a = map_action(Action{raw}, feasible_range(state, limits, dt));
    state = integrate_segment(state, a, dt, 1).second;
    push_distinct(knots, state.p);
  }
  for (const Segment& seg : brake_to_rest(state, limits, dt, 1)) {
    push_distinct(knots, seg.setpoints.back().p);
  }
  return knots;
}

// Last-joint angle that makes the beam horizontal while pointing the same
// way as in the zero pose, closest to zero; NaN if none exists inside the
// joint's shrunk position box.
double level_last_joint(JointVector q, const RobotLimits& limits, const WaypointOptions& opt) {
  const Eigen::Index last = q.size() - 1;
  const JointLimits& l = limits.back();
  const double span = l.p_max - l.p_min;
  const double lo = l.p_min + kBoxMargin * span;
  const double hi = l.p_max - kBoxMargin * span;
  const ChainSpec& chain = *opt.level_chain;
  const Eigen::Vector3d heading0 =
      fk(chain, JointVector::Zero(q.size())).orientation * opt.ball.beam_axis;
  const auto tilt = [&](double x) {
    q[last] = x;
    return beam_tilt(chain, q, opt.ball);
  };
  // The tilt is continuous in the joint angle, so a sign change on the scan
  // brackets a level pose.
  constexpr int kScan = 512;
  double best = std::nan("");
  double x0 = lo;
  double f0 = tilt(x0);
  for (int i = 1; i <= kScan; ++i) {
    const double x1 = lo + (hi - lo) * i / kScan;
    const double f1 = tilt(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = tilt(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      q[last] = root;
      const Eigen::Vector3d heading = fk(chain, q).orientation * opt.ball.beam_axis;
      if (heading.dot(heading0) > 0.0 && (std::isnan(best) || std::abs(root) < std::abs(best))) {
        best = root;
      }
    }
    x0 = x1;
    f0 = f1;
  }
  return best;
}

double max_path_tilt(const std::vector<JointVector>& knots, const WaypointOptions& opt) {
  const CubicPath path = build_path(knots);
  double worst = 0.0;
  for (int k = 0; k <= kLevelCheckSamples; ++k) {
    const JointVector q = path.eval(path.total_length() * k / kLevelCheckSamples);
    worst = std::max(worst, std::abs(beam_tilt(*opt.level_chain, q, opt.ball)));
  }
  return worst;
}

}  // namespace

std::vector<PathRecord> gen_random_paths(const RobotLimits& limits, int count, std::uint64_t seed,
                                         const RandomPathOptions& options, Execution exec) {
  if (count < 1) throw PreconditionError("gen_random_paths: count must be >= 1");
  const int steps = std::max(options.steps_per_path, 2);
  std::vector<PathRecord> out(static_cast<std::size_t>(count));
  for_each_index(out.size(), exec, [&](std::size_t i) {
    PathRecord& rec = out[i];
    rec.id = record_id(Generator::kRandom, i);
    rec.dim = static_cast<int>(limits.size());
    rec.generator = Generator::kRandom;
    rec.seed = derive_seed(seed, i);
    // A rollout that never leaves its start is regenerated from a fresh stream.
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(attempt == 0 ? rec.seed : derive_seed(rec.seed, attempt));
      rec.knots = random_rollout_knots(limits, steps, options.dt, rng);
      if (rec.knots.size() >= 2) break;
    }
  });
  return out;
}

std::vector<PathRecord> gen_waypoint_paths(const RobotLimits& limits, int count,
                                           std::uint64_t seed, const WaypointOptions& options,
                                           Execution exec) {
  if (count < 1) throw PreconditionError("gen_waypoint_paths: count must be >= 1");
  if (options.waypoints_per_path < 2) {
    throw PreconditionError("gen_waypoint_paths: waypoints_per_path must be >= 2");
  }
  if (options.level_chain && options.level_chain->dimension() != static_cast<int>(limits.size())) {
    throw PreconditionError("gen_waypoint_paths: level chain dimension mismatch");
  }
  std::vector<PathRecord> out(static_cast<std::size_t>(count));
  for_each_index(out.size(), exec, [&](std::size_t i) {
    PathRecord& rec = out[i];
    rec.id = record_id(Generator::kWaypoint, i);
    rec.dim = static_cast<int>(limits.size());
    rec.generator = Generator::kWaypoint;
    rec.seed = derive_seed(seed, i);
    Rng rng(rec.seed);
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxLevelAttempts) {
        throw RuntimeFailure("gen_waypoint_paths: no level path found for " + rec.id);
      }
      rec.knots.clear();
      while (static_cast<int>(rec.knots.size()) < options.waypoints_per_path) {
        JointVector q = random_box_point(limits, rng);
        if (options.level_chain) {
          const double x = level_last_joint(q, limits, options);
          if (std::isnan(x)) continue;
          q[q.size() - 1] = x;
        }
        push_distinct(rec.knots, q);
      }
      if (!options.level_chain || max_path_tilt(rec.knots, options) <= options.level_tolerance) break;
    }
  });
  return out;
}

void save_dataset(const std::string& file, const std::vector<PathRecord>& records) {
  std::ofstream out(file);
  if (!out) throw RuntimeFailure("cannot write dataset file " + file);
  for (const PathRecord& rec : records) {
    json knots = json::array();
    for (const JointVector& q : rec.knots) {
      knots.push_back(std::vector<double>(q.data(), q.data() + q.size()));
    }
    const json line = {{"id", rec.id},
                       {"dim", rec.dim},
                       {"generator", to_string(rec.generator)},
                       {"seed", rec.seed},
                       {"knots", knots}};
    out << line.dump() << '\n';
  }
  if (!out) throw RuntimeFailure("failed writing dataset file " + file);
}

std::vector<PathRecord> load_dataset(const std::string& file, int expected_dim) {
  std::ifstream in(file);
  if (!in) throw ConfigError("dataset: cannot open " + file);
  std::vector<PathRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = file + ":" + std::to_string(lineno);
    PathRecord rec;
    try {
      const json j = json::parse(line);
      rec.id = j.at("id").get<std::string>();
      rec.dim = j.at("dim").get<int>();
      rec.generator = generator_from_string(j.at("generator").get<std::string>());
      rec.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& k : j.at("knots")) {
        const auto v = k.get<std::vector<double>>();
        rec.knots.push_back(Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
    } catch (const json::exception& e) {
      throw ConfigError("dataset " + where + ": malformed record (" + e.what() + ")");
    }
    if (rec.knots.size() < 2) throw ConfigError("dataset " + where + ": knots: need at least 2");
    for (const JointVector& q : rec.knots) {
      if (q.size() != rec.dim) throw ConfigError("dataset " + where + ": knots: dimension differs from dim");
    }
    if (expected_dim > 0 && rec.dim != expected_dim) {
      throw ConfigError("dataset " + where + ": dim: " + std::to_string(rec.dim) +
                        " does not match robot with " + std::to_string(expected_dim) + " joints");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string manifest_path(const std::string& dataset_file) { return dataset_file + ".manifest.json"; }

void save_manifest(const std::string& dataset_file, const DatasetManifest& m) {
  std::ofstream out(manifest_path(dataset_file));
  if (!out) throw RuntimeFailure("cannot write manifest for " + dataset_file);
  const json j = {{"format", "ptrack-dataset-1"},
                  {"master_seed", m.master_seed},
                  {"count", m.count},
                  {"generator", to_string(m.generator)},
                  {"dim", m.dim},
                  {m.generator == Generator::kRandom ? "steps_per_path" : "waypoints_per_path",
                   m.steps_or_waypoints}};
  out << j.dump(2) << '\n';
}

DatasetManifest load_manifest(const std::string& dataset_file) {
  std::ifstream in(manifest_path(dataset_file));
  if (!in) throw ConfigError("manifest: cannot open " + manifest_path(dataset_file));
  try {
    const json j = json::parse(in);
    DatasetManifest m;
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.count = j.at("count").get<std::size_t>();
    m.generator = generator_from_string(j.at("generator").get<std::string>());
    m.dim = j.at("dim").get<int>();
    m.steps_or_waypoints =
        j.at(m.generator == Generator::kRandom ? "steps_per_path" : "waypoints_per_path").get<int>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: malformed (") + e.what() + ")");
  }
}

std::pair<std::vector<PathRecord>, std::vector<PathRecord>> split_dataset(
    const std::vector<PathRecord>& records, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw PreconditionError("split ratio must be in (0, 1)");
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(records.size())));
  std::pair<std::vector<PathRecord>, std::vector<PathRecord>> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_train ? out.first : out.second).push_back(records[order[k]]);
  }
  return out;
}

}  // namespace ptrack
