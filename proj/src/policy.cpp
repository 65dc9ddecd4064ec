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
#include "ptrack/policy.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace ptrack {

using nlohmann::json;

int observation_size(int dimension, int n_knots, Task task) {
  return n_knots * dimension + 2 + 3 * dimension + (task == Task::kBallBeam ? 2 : 0);
}

Eigen::VectorXd observation_features(const Observation& obs, const RobotLimits& limits,
                                     const EnvConfig& config) {
  const int dim = static_cast<int>(limits.size());
  const int n = static_cast<int>(obs.window.knots.size());
  const double scale = (config.n_knots - 1) * config.knot_spacing;
  Eigen::VectorXd x(observation_size(dim, n, config.task));
  Eigen::Index k = 0;
  for (const JointVector& knot : obs.window.knots) {
    for (int j = 0; j < dim; ++j) x[k++] = (knot[j] - obs.kin.p[j]) / scale;
  }
  x[k++] = obs.window.l_state / scale;
  x[k++] = obs.window.offset / scale;
  for (int j = 0; j < dim; ++j) {
    const JointLimits& l = limits[j];
    x[k++] = (2.0 * obs.kin.p[j] - l.p_max - l.p_min) / (l.p_max - l.p_min);
  }
  for (int j = 0; j < dim; ++j) {
    x[k++] = obs.kin.v[j] / std::max(-limits[j].v_min, limits[j].v_max);
  }
  for (int j = 0; j < dim; ++j) {
    x[k++] = obs.kin.a[j] / std::max(-limits[j].a_min, limits[j].a_max);
  }
  if (config.task == Task::kBallBeam) {
    const double h = config.ball.half_length;
    x[k++] = obs.feedback.at(0) / h;
    x[k++] = obs.feedback.at(1) / std::sqrt(config.ball.gravity * h);
  }
  return x;
}

bool PolicyParams::finite() const {
  return net.parameters().allFinite() && log_std.allFinite();
}

PolicyParams PolicyParams::initial(int dimension, const EnvConfig& config, Rng& rng,
                                   const std::vector<int>& hidden, double log_std) {
  std::vector<int> sizes{observation_size(dimension, config.n_knots, config.task)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(dimension);
  PolicyParams p;
  p.net = Mlp::glorot(sizes, rng);
  p.log_std = Eigen::VectorXd::Constant(dimension, log_std);
  p.task = config.task;
  p.n_knots = config.n_knots;
  return p;
}

void check_compatible(const PolicyParams& params, int dimension, const EnvConfig& config) {
  if (params.action_dim() != dimension) {
    throw ConfigError("checkpoint has action_dim " + std::to_string(params.action_dim()) +
                      ", robot has " + std::to_string(dimension) + " joints");
  }
  if (params.task != config.task || params.n_knots != config.n_knots) {
    throw ConfigError(std::string("checkpoint was trained for task ") + to_string(params.task) +
                      " with n_knots " + std::to_string(params.n_knots) + ", config has task " +
                      to_string(config.task) + " with n_knots " + std::to_string(config.n_knots));
  }
  const int expected = observation_size(dimension, config.n_knots, config.task);
  if (params.obs_dim() != expected) {
    throw ConfigError("checkpoint has obs_dim " + std::to_string(params.obs_dim()) +
                      ", config needs " + std::to_string(expected));
  }
}

Action act(const PolicyParams& params, const Eigen::VectorXd& features, bool stochastic,
           Rng* rng) {
  Eigen::VectorXd pre = params.net.forward(features);
  if (stochastic) {
    if (rng == nullptr) throw PreconditionError("act: stochastic mode needs an rng");
    for (Eigen::Index j = 0; j < pre.size(); ++j) pre[j] += std::exp(params.log_std[j]) * rng->normal();
  }
  return Action::from(pre.array().tanh().matrix());
}

Action act(const PolicyParams& params, const Observation& obs, const RobotLimits& limits,
           const EnvConfig& config, bool stochastic, Rng* rng) {
  return act(params, observation_features(obs, limits, config), stochastic, rng);
}

double gaussian_log_prob(const Eigen::VectorXd& pre, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std) {
  double lp = 0.0;
  for (Eigen::Index j = 0; j < pre.size(); ++j) {
    const double z = (pre[j] - mean[j]) * std::exp(-log_std[j]);
    lp += -0.5 * z * z - log_std[j] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

void write_checkpoint(std::ostream& out, const PolicyParams& params) {
  json j;
  j["format"] = "ptrack-policy";
  j["version"] = kCheckpointVersion;
  j["obs_dim"] = params.obs_dim();
  j["action_dim"] = params.action_dim();
  j["task"] = to_string(params.task);
  j["n_knots"] = params.n_knots;
  j["layers"] = json::array();
  for (const Mlp::Layer& layer : params.net.layers()) {
    json l;
    l["rows"] = layer.w.rows();
    l["cols"] = layer.w.cols();
    std::vector<double> w;
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) w.push_back(layer.w(r, c));
    }
    l["w"] = w;
    l["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
    j["layers"].push_back(l);
  }
  j["log_std"] = std::vector<double>(params.log_std.data(), params.log_std.data() + params.log_std.size());
  out << j.dump() << "\n";
}

PolicyParams read_checkpoint(std::istream& in, const std::string& name) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(name + ": not a JSON checkpoint (" + e.what() + ")");
  }
  try {
    if (j.at("format").get<std::string>() != "ptrack-policy") {
      throw ConfigError(name + ": format: expected \"ptrack-policy\"");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ConfigError(name + ": version: unsupported " + j.at("version").dump());
    }
    PolicyParams p;
    const std::string task = j.at("task").get<std::string>();
    if (task == "none") {
      p.task = Task::kNone;
    } else if (task == "ball-beam") {
      p.task = Task::kBallBeam;
    } else {
      throw ConfigError(name + ": task: unknown \"" + task + "\"");
    }
    p.n_knots = j.at("n_knots").get<int>();
    const json& layers = j.at("layers");
    if (!layers.is_array() || layers.empty()) throw ConfigError(name + ": layers: must be a non-empty array");
    std::vector<int> sizes{layers[0].at("cols").get<int>()};
    for (const json& l : layers) sizes.push_back(l.at("rows").get<int>());
    p.net = Mlp(sizes);
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const json& l = layers[k];
      Mlp::Layer& layer = p.net.layers()[k];
      if (l.at("cols").get<int>() != layer.w.cols()) {
        throw ConfigError(name + ": layers[" + std::to_string(k) + "].cols: does not chain");
      }
      const auto w = l.at("w").get<std::vector<double>>();
      const auto b = l.at("b").get<std::vector<double>>();
      if (w.size() != static_cast<std::size_t>(layer.w.size()) ||
          b.size() != static_cast<std::size_t>(layer.b.size())) {
        throw ConfigError(name + ": layers[" + std::to_string(k) + "]: weight count mismatch");
      }
      for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.w.cols(); ++c) layer.w(r, c) = w[r * layer.w.cols() + c];
      }
      layer.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    }
    const auto ls = j.at("log_std").get<std::vector<double>>();
    if (static_cast<int>(ls.size()) != p.action_dim()) throw ConfigError(name + ": log_std: wrong length");
    p.log_std = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
    if (j.at("obs_dim").get<int>() != p.obs_dim() || j.at("action_dim").get<int>() != p.action_dim()) {
      throw ConfigError(name + ": obs_dim/action_dim disagree with the layer shapes");
    }
    if (!p.finite()) throw ConfigError(name + ": non-finite parameters");
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

void save_checkpoint(const std::string& file, const PolicyParams& params) {
  std::ofstream out(file);
  if (!out) throw ConfigError(file + ": cannot open for writing");
  write_checkpoint(out, params);
  if (!out) throw RuntimeFailure(file + ": write failed");
}

PolicyParams load_checkpoint(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file + ": cannot open");
  return read_checkpoint(in, file);
}

}  // namespace ptrack
