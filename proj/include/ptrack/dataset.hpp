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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ptrack/env.hpp"
#include "ptrack/kinematics.hpp"
#include "ptrack/limits.hpp"
#include "ptrack/parallel.hpp"
#include "ptrack/spline.hpp"

namespace ptrack {

enum class Generator { kRandom, kWaypoint };

const char* to_string(Generator generator);
Generator generator_from_string(const std::string& name);

struct PathRecord {
  std::string id;
  int dim = 0;
  Generator generator = Generator::kRandom;
  std::uint64_t seed = 0;
  std::vector<JointVector> knots;

  CubicPath path() const { return build_path(knots); }
  bool operator==(const PathRecord& other) const;
};

/// Consecutive knots closer than this are merged.
inline constexpr double kKnotDedupDistance = 1e-6;
/// Fraction of each joint's position range kept free at both ends.
inline constexpr double kBoxMargin = 0.05;
inline constexpr int kDefaultRandomSteps = 50;
inline constexpr int kDefaultWaypoints = 4;

struct RandomPathOptions {
  int steps_per_path = kDefaultRandomSteps;
  double dt = 0.1;
};

/// Paths traced by uniformly random actions from rest, followed by braking.
/// Knots are the decision-step positions. Path i uses derive_seed(seed, i).
std::vector<PathRecord> gen_random_paths(const RobotLimits& limits, int count, std::uint64_t seed,
                                         const RandomPathOptions& options = {},
                                         Execution exec = Execution::kParallel);

struct WaypointOptions {
  int waypoints_per_path = kDefaultWaypoints;
  /// When set, the last joint of every knot is solved so that the beam of
  /// `ball` is horizontal, and paths whose spline tilts the beam by more than
  /// level_tolerance anywhere are redrawn.
  const ChainSpec* level_chain = nullptr;
  BallBeamConfig ball;
  double level_tolerance = 1e-6;
};

/// Paths through waypoints sampled uniformly in the position box shrunk by
/// kBoxMargin.
std::vector<PathRecord> gen_waypoint_paths(const RobotLimits& limits, int count,
                                           std::uint64_t seed,
                                           const WaypointOptions& options = {},
                                           Execution exec = Execution::kParallel);

/// One JSON object per line with fields id, dim, generator, seed, knots.
void save_dataset(const std::string& file, const std::vector<PathRecord>& records);
/// Throws ConfigError on malformed lines or, when expected_dim > 0, on a
/// dimension mismatch.
std::vector<PathRecord> load_dataset(const std::string& file, int expected_dim = 0);

struct DatasetManifest {
  std::uint64_t master_seed = 0;
  std::size_t count = 0;
  Generator generator = Generator::kRandom;
  int dim = 0;
  int steps_or_waypoints = 0;
};

std::string manifest_path(const std::string& dataset_file);
void save_manifest(const std::string& dataset_file, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& dataset_file);

/// Seeded shuffle, then the first round(ratio * n) records go to train.
std::pair<std::vector<PathRecord>, std::vector<PathRecord>> split_dataset(
    const std::vector<PathRecord>& records, double ratio, std::uint64_t seed);

}  // namespace ptrack
