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

#include <string>

#include "ptrack/env.hpp"
#include "ptrack/kinematics.hpp"
#include "ptrack/limits.hpp"

namespace ptrack {

/// Serial chain, per-joint limits and environment defaults of one robot.
struct RobotConfig {
  std::string name;
  ChainSpec chain;
  RobotLimits limits;
  EnvConfig env;

  int dimension() const { return static_cast<int>(limits.size()); }
  void validate() const;
};

/// Throws ConfigError naming the offending field (e.g.
/// "robot.joints[1].limits.v_min: must be negative").
RobotConfig parse_robot_config(const std::string& json_text);
RobotConfig load_robot_config(const std::string& file);
std::string robot_config_to_json(const RobotConfig& config);

}  // namespace ptrack
