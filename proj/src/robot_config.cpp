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
#include "ptrack/robot_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ptrack {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": must be an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": must be an integer");
  return j.get<int>();
}

Eigen::Vector3d vector3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path + ": must be an array of 3 numbers");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]"), number(j[2], path + "[2]")};
}

template <typename T>
void optional(const json& j, const std::string& key, const std::string& path, T& out,
              T (*read)(const json&, const std::string&)) {
  if (j.contains(key)) out = read(j.at(key), path + "." + key);
}

KnotSampling sampling_from(const json& j, const std::string& path) {
  if (j == "distance") return KnotSampling::kDistance;
  if (j == "curvature") return KnotSampling::kCurvature;
  throw ConfigError(path + ": must be \"distance\" or \"curvature\"");
}

Task task_from(const json& j, const std::string& path) {
  if (j == "none") return Task::kNone;
  if (j == "ball-beam") return Task::kBallBeam;
  throw ConfigError(path + ": must be \"none\" or \"ball-beam\"");
}

void read_env(const json& j, const std::string& path, EnvConfig& env) {
  if (!j.is_object()) throw ConfigError(path + ": must be an object");
  optional(j, "dt", path, env.dt, number);
  optional(j, "n_knots", path, env.n_knots, integer);
  optional(j, "knot_spacing", path, env.knot_spacing, number);
  optional(j, "termination_deviation", path, env.termination_deviation, number);
  optional(j, "max_steps", path, env.max_steps, integer);
  optional(j, "substeps", path, env.substeps, integer);
  optional(j, "sampling", path, env.sampling, sampling_from);
  optional(j, "task", path, env.task, task_from);
  if (j.contains("reward")) {
    const json& r = j.at("reward");
    const std::string rp = path + ".reward";
    if (!r.is_object()) throw ConfigError(rp + ": must be an object");
    optional(r, "alpha", rp, env.reward.alpha, number);
    optional(r, "beta", rp, env.reward.beta, number);
    optional(r, "gamma", rp, env.reward.gamma, number);
    optional(r, "l_end", rp, env.reward.l_end, number);
    optional(r, "d_max", rp, env.reward.d_max, number);
  }
  if (j.contains("ball_beam")) {
    const json& b = j.at("ball_beam");
    const std::string bp = path + ".ball_beam";
    if (!b.is_object()) throw ConfigError(bp + ": must be an object");
    optional(b, "half_length", bp, env.ball.half_length, number);
    optional(b, "gravity", bp, env.ball.gravity, number);
    optional(b, "beam_axis", bp, env.ball.beam_axis, vector3);
    optional(b, "up", bp, env.ball.up, vector3);
  }
}

}  // namespace

void RobotConfig::validate() const {
  if (limits.empty()) throw ConfigError("robot.joints: need at least one joint");
  for (std::size_t i = 0; i < limits.size(); ++i) {
    limits[i].validate("robot.joints[" + std::to_string(i) + "].limits");
  }
  chain.validate("robot");
  if (chain.dimension() != dimension()) {
    throw ConfigError("robot.joints: chain and limits disagree on the joint count");
  }
  env.validate("robot.env");
}

RobotConfig parse_robot_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("robot: invalid JSON (") + e.what() + ")");
  }
  const std::string root = "robot";
  RobotConfig cfg;
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  const json& joints = field(j, "joints", root);
  if (!joints.is_array() || joints.empty()) throw ConfigError("robot.joints: must be a non-empty array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string jp = root + ".joints[" + std::to_string(i) + "]";
    const json& jj = joints[i];
    ChainJoint cj;
    cj.axis = vector3(field(jj, "axis", jp), jp + ".axis");
    cj.translation = vector3(field(jj, "translation", jp), jp + ".translation");
    cfg.chain.joints.push_back(cj);
    const json& lj = field(jj, "limits", jp);
    const std::string lp = jp + ".limits";
    JointLimits l;
    l.p_min = number(field(lj, "p_min", lp), lp + ".p_min");
    l.p_max = number(field(lj, "p_max", lp), lp + ".p_max");
    l.v_min = number(field(lj, "v_min", lp), lp + ".v_min");
    l.v_max = number(field(lj, "v_max", lp), lp + ".v_max");
    l.a_min = number(field(lj, "a_min", lp), lp + ".a_min");
    l.a_max = number(field(lj, "a_max", lp), lp + ".a_max");
    l.j_min = number(field(lj, "j_min", lp), lp + ".j_min");
    l.j_max = number(field(lj, "j_max", lp), lp + ".j_max");
    cfg.limits.push_back(l);
  }
  if (j.contains("base")) {
    const json& b = j.at("base");
    if (b.contains("position")) cfg.chain.base_position = vector3(b.at("position"), "robot.base.position");
    if (b.contains("orientation")) {
      const json& q = b.at("orientation");
      if (!q.is_array() || q.size() != 4) {
        throw ConfigError("robot.base.orientation: must be [w, x, y, z]");
      }
      cfg.chain.base_orientation =
          Eigen::Quaterniond(number(q[0], "robot.base.orientation[0]"), number(q[1], "robot.base.orientation[1]"),
                             number(q[2], "robot.base.orientation[2]"), number(q[3], "robot.base.orientation[3]"));
    }
  }
  if (j.contains("tcp")) cfg.chain.tcp_offset = vector3(j.at("tcp"), "robot.tcp");
  if (j.contains("env")) read_env(j.at("env"), "robot.env", cfg.env);
  cfg.validate();
  return cfg;
}

RobotConfig load_robot_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("robot: cannot open " + file);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_robot_config(buf.str());
}

std::string robot_config_to_json(const RobotConfig& cfg) {
  const auto v3 = [](const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); };
  json joints = json::array();
  for (std::size_t i = 0; i < cfg.limits.size(); ++i) {
    const JointLimits& l = cfg.limits[i];
    joints.push_back({{"axis", v3(cfg.chain.joints[i].axis)},
                      {"translation", v3(cfg.chain.joints[i].translation)},
                      {"limits",
                       {{"p_min", l.p_min}, {"p_max", l.p_max}, {"v_min", l.v_min}, {"v_max", l.v_max},
                        {"a_min", l.a_min}, {"a_max", l.a_max}, {"j_min", l.j_min}, {"j_max", l.j_max}}}});
  }
  const auto& q = cfg.chain.base_orientation;
  const EnvConfig& e = cfg.env;
  const json j = {
      {"name", cfg.name},
      {"joints", joints},
      {"base", {{"position", v3(cfg.chain.base_position)}, {"orientation", {q.w(), q.x(), q.y(), q.z()}}}},
      {"tcp", v3(cfg.chain.tcp_offset)},
      {"env",
       {{"dt", e.dt},
        {"n_knots", e.n_knots},
        {"sampling", to_string(e.sampling)},
        {"knot_spacing", e.knot_spacing},
        {"termination_deviation", e.termination_deviation},
        {"max_steps", e.max_steps},
        {"substeps", e.substeps},
        {"task", to_string(e.task)},
        {"reward",
         {{"alpha", e.reward.alpha}, {"beta", e.reward.beta}, {"gamma", e.reward.gamma},
          {"l_end", e.reward.l_end}, {"d_max", e.reward.d_max}}},
        {"ball_beam",
         {{"half_length", e.ball.half_length}, {"gravity", e.ball.gravity},
          {"beam_axis", v3(e.ball.beam_axis)}, {"up", v3(e.ball.up)}}}}}};
  return j.dump(2);
}

}  // namespace ptrack
