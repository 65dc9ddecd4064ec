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

#include <fstream>

#include <json.hpp>

#include "ptrack/robot_config.hpp"

namespace ptrack {
namespace {

std::string config_file(const char* name) { return std::string(PTRACK_CONFIG_DIR) + "/" + name; }

TEST(RobotConfig, ShippedConfigsLoad) {
  const RobotConfig arm = load_robot_config(config_file("arm3.json"));
  EXPECT_EQ(arm.dimension(), 3);
  EXPECT_EQ(arm.chain.dimension(), 3);
  const RobotConfig iiwa = load_robot_config(config_file("iiwa7.json"));
  EXPECT_EQ(iiwa.dimension(), 7);
  EXPECT_EQ(iiwa.env.n_knots, 9);
  EXPECT_EQ(iiwa.env.sampling, KnotSampling::kCurvature);
}

TEST(RobotConfig, RoundTripThroughJson) {
  const RobotConfig arm = load_robot_config(config_file("arm3.json"));
  const RobotConfig again = parse_robot_config(robot_config_to_json(arm));
  EXPECT_EQ(robot_config_to_json(again), robot_config_to_json(arm));
}

std::string with_edit(void (*edit)(nlohmann::json&)) {
  std::ifstream in(config_file("arm3.json"));
  nlohmann::json j = nlohmann::json::parse(in);
  edit(j);
  return j.dump();
}

void expect_error(const std::string& text, const std::string& message) {
  try {
    parse_robot_config(text);
    FAIL() << "expected ConfigError: " << message;
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), message);
  }
}

TEST(RobotConfig, ErrorsNameTheField) {
  expect_error(with_edit([](nlohmann::json& j) { j["joints"][1]["limits"]["v_min"] = 0.5; }),
               "robot.joints[1].limits.v_min: must be negative");
  expect_error(with_edit([](nlohmann::json& j) { j["joints"][0]["limits"].erase("j_max"); }),
               "robot.joints[0].limits.j_max: missing");
  expect_error(with_edit([](nlohmann::json& j) { j["joints"][2]["axis"] = {0, 0, 2}; }),
               "robot.joints[2].axis: must be unit-norm");
  expect_error(with_edit([](nlohmann::json& j) { j["env"]["n_knots"] = 1; }),
               "robot.env.n_knots: must be >= 2");
  expect_error(with_edit([](nlohmann::json& j) { j["env"]["sampling"] = "spiral"; }),
               "robot.env.sampling: must be \"distance\" or \"curvature\"");
  expect_error(with_edit([](nlohmann::json& j) { j["joints"][0]["translation"] = "x"; }),
               "robot.joints[0].translation: must be an array of 3 numbers");
  EXPECT_THROW(parse_robot_config("{"), ConfigError);
  EXPECT_THROW(load_robot_config("/nonexistent/robot.json"), ConfigError);
}

}  // namespace
}  // namespace ptrack
