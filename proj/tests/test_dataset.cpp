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
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ptrack/dataset.hpp"
#include "ptrack/robot_config.hpp"

namespace ptrack {
namespace {

RobotConfig arm3() { return load_robot_config(std::string(PTRACK_CONFIG_DIR) + "/arm3.json"); }

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ptrack_test_" + name)).string();
}

bool within_box(const JointVector& q, const RobotLimits& limits) {
  for (std::size_t j = 0; j < limits.size(); ++j) {
    const double x = q[static_cast<Eigen::Index>(j)];
    if (x < limits[j].p_min - kLimitSlack || x > limits[j].p_max + kLimitSlack) return false;
  }
  return true;
}

TEST(RandomPaths, MinimumLengthEnforced) {
  const RobotConfig cfg = arm3();
  RandomPathOptions opt;
  opt.steps_per_path = 0;
  const auto recs = gen_random_paths(cfg.limits, 1, 7, opt);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_GE(recs[0].knots.size(), 2u);
  EXPECT_NO_THROW(recs[0].path());
}

TEST(RandomPaths, DeterministicAndParallelMatchesSerial) {
  const RobotConfig cfg = arm3();
  const auto a = gen_random_paths(cfg.limits, 12, 42, {}, Execution::kSerial);
  const auto b = gen_random_paths(cfg.limits, 12, 42, {}, Execution::kSerial);
  const auto c = gen_random_paths(cfg.limits, 12, 42, {}, Execution::kParallel);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  const auto d = gen_random_paths(cfg.limits, 12, 43, {}, Execution::kSerial);
  EXPECT_FALSE(a == d);
}

TEST(RandomPaths, KnotsRespectPositionLimitsAndAreDistinct) {
  const RobotConfig cfg = arm3();
  const auto recs = gen_random_paths(cfg.limits, 100, 3);
  std::set<std::string> ids;
  for (const auto& r : recs) {
    ids.insert(r.id);
    EXPECT_EQ(r.dim, 3);
    EXPECT_EQ(r.generator, Generator::kRandom);
    for (std::size_t i = 0; i < r.knots.size(); ++i) {
      EXPECT_TRUE(within_box(r.knots[i], cfg.limits));
      if (i > 0) EXPECT_GE((r.knots[i] - r.knots[i - 1]).norm(), kKnotDedupDistance);
    }
    EXPECT_NO_THROW(r.path());
  }
  EXPECT_EQ(ids.size(), recs.size());
}

// The source rollouts are rebuilt here from the recorded knots: every knot
// step must be reachable within one decision interval at the velocity limit.
TEST(RandomPaths, ConsecutiveKnotsWithinOneIntervalOfMotion) {
  const RobotConfig cfg = arm3();
  for (const auto& r : gen_random_paths(cfg.limits, 50, 11)) {
    for (std::size_t i = 1; i < r.knots.size(); ++i) {
      for (int j = 0; j < 3; ++j) {
        const double step = std::abs(r.knots[i][j] - r.knots[i - 1][j]);
        EXPECT_LE(step, cfg.limits[static_cast<std::size_t>(j)].v_max * 0.1 + 1e-9);
      }
    }
  }
}

TEST(WaypointPaths, CountsBoxAndDeterminism) {
  const RobotConfig cfg = arm3();
  WaypointOptions opt;
  opt.waypoints_per_path = 2;
  const auto two = gen_waypoint_paths(cfg.limits, 5, 1, opt);
  for (const auto& r : two) {
    EXPECT_EQ(r.knots.size(), 2u);
    for (const auto& q : r.knots) {
      for (int j = 0; j < 3; ++j) {
        const auto& l = cfg.limits[static_cast<std::size_t>(j)];
        const double m = kBoxMargin * (l.p_max - l.p_min);
        EXPECT_GE(q[j], l.p_min + m);
        EXPECT_LE(q[j], l.p_max - m);
      }
    }
  }
  EXPECT_EQ(gen_waypoint_paths(cfg.limits, 5, 1, opt), two);
  EXPECT_EQ(gen_waypoint_paths(cfg.limits, 5, 1, opt, Execution::kSerial), two);
  EXPECT_THROW(gen_waypoint_paths(cfg.limits, 5, 1, WaypointOptions{1, nullptr, {}, 1e-6}), PreconditionError);
}

TEST(WaypointPaths, SparserThanRandomPaths) {
  const RobotConfig cfg = arm3();
  double random_mean = 0.0, waypoint_mean = 0.0;
  for (const auto& r : gen_random_paths(cfg.limits, 50, 5)) random_mean += r.knots.size() / 50.0;
  for (const auto& r : gen_waypoint_paths(cfg.limits, 50, 5)) waypoint_mean += r.knots.size() / 50.0;
  EXPECT_LT(waypoint_mean, random_mean);
}

TEST(WaypointPaths, LevelOptionKeepsBeamHorizontal) {
  const RobotConfig cfg = arm3();
  WaypointOptions opt;
  opt.level_chain = &cfg.chain;
  opt.ball = cfg.env.ball;
  for (const auto& r : gen_waypoint_paths(cfg.limits, 20, 9, opt)) {
    for (const auto& q : r.knots) EXPECT_NEAR(beam_tilt(cfg.chain, q, cfg.env.ball), 0.0, 1e-9);
    // The planar arm's tilt is linear in the joints, so the whole spline stays level.
    const CubicPath path = r.path();
    for (int k = 0; k <= 50; ++k) {
      EXPECT_NEAR(beam_tilt(cfg.chain, path.eval(path.total_length() * k / 50.0), cfg.env.ball), 0.0, 1e-9);
    }
  }
}

TEST(DatasetFile, RoundTripIsExact) {
  const RobotConfig cfg = arm3();
  auto recs = gen_random_paths(cfg.limits, 10, 77);
  const auto wp = gen_waypoint_paths(cfg.limits, 3, 5);
  recs.insert(recs.end(), wp.begin(), wp.end());
  const std::string file = temp_file("roundtrip.jsonl");
  save_dataset(file, recs);
  EXPECT_EQ(load_dataset(file, 3), recs);
  save_manifest(file, {77, recs.size(), Generator::kRandom, 3, 50});
  const DatasetManifest m = load_manifest(file);
  EXPECT_EQ(m.master_seed, 77u);
  EXPECT_EQ(m.count, recs.size());
  EXPECT_EQ(m.steps_or_waypoints, 50);
  EXPECT_THROW(load_dataset(file, 7), ConfigError);
  std::remove(file.c_str());
  std::remove(manifest_path(file).c_str());
}

TEST(DatasetFile, ExactFieldSet) {
  const RobotConfig cfg = arm3();
  const std::string file = temp_file("fields.jsonl");
  save_dataset(file, gen_waypoint_paths(cfg.limits, 1, 5));
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  for (const char* key : {"\"id\"", "\"dim\"", "\"generator\"", "\"seed\"", "\"knots\""}) {
    EXPECT_NE(line.find(key), std::string::npos) << key;
  }
  std::remove(file.c_str());
}

TEST(DatasetFile, MalformedInputReported) {
  const std::string file = temp_file("bad.jsonl");
  {
    std::ofstream out(file);
    out << R"({"id":"a","dim":1,"generator":"random","seed":1,"knots":[[0],[1]]})" << "\n";
    out << R"({"id":"b","dim":2,"generator":"random","seed":1,"knots":[[0,1],[1]]})" << "\n";
  }
  try {
    load_dataset(file);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(file);
    out << "{not json\n";
  }
  EXPECT_THROW(load_dataset(file), ConfigError);
  std::remove(file.c_str());
  EXPECT_THROW(load_dataset(file), ConfigError);
}

TEST(Split, DisjointDeterministic) {
  const RobotConfig cfg = arm3();
  const auto recs = gen_waypoint_paths(cfg.limits, 10, 2);
  const auto [train, test] = split_dataset(recs, 0.8, 5);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(test.size(), 2u);
  std::set<std::string> ids;
  for (const auto& r : train) ids.insert(r.id);
  for (const auto& r : test) EXPECT_EQ(ids.count(r.id), 0u);
  const auto again = split_dataset(recs, 0.8, 5);
  EXPECT_EQ(again.first, train);
  EXPECT_EQ(again.second, test);
  EXPECT_THROW(split_dataset(recs, 1.0, 5), PreconditionError);
}

}  // namespace
}  // namespace ptrack
