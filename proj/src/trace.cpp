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
#include "ptrack/trace.hpp"

#include <ostream>

#include <json.hpp>

namespace ptrack {

using nlohmann::json;

namespace {

std::vector<double> to_vec(const JointVector& v) { return {v.data(), v.data() + v.size()}; }

JointVector from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json setpoint_json(const Setpoint& s) {
  return {{"t", s.t}, {"p", to_vec(s.p)}, {"v", to_vec(s.v)}, {"a", to_vec(s.a)}};
}

Setpoint setpoint_from(const json& j) {
  return {j.at("t").get<double>(), from_json(j.at("p")), from_json(j.at("v")), from_json(j.at("a"))};
}

DoneReason reason_from(const std::string& s) {
  for (DoneReason r : {DoneReason::kNone, DoneReason::kMaxSteps, DoneReason::kDeviation,
                       DoneReason::kBallDropped}) {
    if (s == to_string(r)) return r;
  }
  throw ConfigError("done_reason: unknown \"" + s + "\"");
}

std::vector<Setpoint> braking_setpoints(const KinematicState& state, const Env& env, double t0) {
  std::vector<Setpoint> out;
  const auto segs = brake_to_rest(state, env.limits(), env.config().dt, env.config().substeps);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    for (Setpoint sp : segs[k].setpoints) {
      sp.t += t0 + static_cast<double>(k) * env.config().dt;
      out.push_back(sp);
    }
  }
  return out;
}

}  // namespace

Trace record_trace(Env& env, const CubicPath& path, const std::string& path_id,
                   const PolicyFn& policy) {
  Trace tr;
  tr.path_id = path_id;
  tr.dt = env.config().dt;
  tr.substeps = env.config().substeps;
  Observation obs = env.reset(path);
  tr.start = env.state();
  const double total = path.total_length();
  bool at_end = total - env.progress() <= kPathEndTolerance;
  while (!at_end && !env.done()) {
    const double t0 = env.time();
    StepResult r = env.step(policy(obs));
    TraceStep s;
    s.t = env.time();
    s.action = r.action.values;
    s.a_next = r.a_next;
    s.state = env.state();
    s.progress = env.progress();
    s.reward = r.reward;
    s.reason = r.reason;
    s.ball = r.ball;
    for (Setpoint sp : r.segment.setpoints) {
      sp.t += t0;
      s.setpoints.push_back(sp);
    }
    tr.steps.push_back(std::move(s));
    at_end = total - env.progress() <= kPathEndTolerance;
    obs = r.obs;
  }
  tr.braking = braking_setpoints(env.state(), env, env.time());
  return tr;
}

void write_trace_json(std::ostream& out, const Trace& trace) {
  json j;
  j["path_id"] = trace.path_id;
  j["dt"] = trace.dt;
  j["substeps"] = trace.substeps;
  j["start"] = {{"p", to_vec(trace.start.p)}, {"v", to_vec(trace.start.v)}, {"a", to_vec(trace.start.a)}};
  j["steps"] = json::array();
  for (const TraceStep& s : trace.steps) {
    json row = {{"t", s.t},
                {"action", to_vec(s.action)},
                {"a_next", to_vec(s.a_next)},
                {"p", to_vec(s.state.p)},
                {"v", to_vec(s.state.v)},
                {"a", to_vec(s.state.a)},
                {"progress", s.progress},
                {"l", s.reward.l},
                {"d", s.reward.d},
                {"r_l", s.reward.r_l},
                {"r_d", s.reward.r_d},
                {"r_s", s.reward.r_s},
                {"total", s.reward.total},
                {"done_reason", to_string(s.reason)}};
    if (s.ball) row["ball"] = {s.ball->b, s.ball->bdot};
    row["setpoints"] = json::array();
    for (const Setpoint& sp : s.setpoints) row["setpoints"].push_back(setpoint_json(sp));
    j["steps"].push_back(std::move(row));
  }
  j["braking"] = json::array();
  for (const Setpoint& sp : trace.braking) j["braking"].push_back(setpoint_json(sp));
  out << j.dump(1) << '\n';
}

Trace read_trace_json(std::istream& in, const std::string& name) {
  try {
    json j;
    in >> j;
    Trace tr;
    tr.path_id = j.at("path_id").get<std::string>();
    tr.dt = j.at("dt").get<double>();
    tr.substeps = j.at("substeps").get<int>();
    const json& st = j.at("start");
    tr.start = {from_json(st.at("p")), from_json(st.at("v")), from_json(st.at("a"))};
    for (const json& row : j.at("steps")) {
      TraceStep s;
      s.t = row.at("t").get<double>();
      s.action = from_json(row.at("action"));
      s.a_next = from_json(row.at("a_next"));
      s.state = {from_json(row.at("p")), from_json(row.at("v")), from_json(row.at("a"))};
      s.progress = row.at("progress").get<double>();
      s.reward.l = row.at("l").get<double>();
      s.reward.d = row.at("d").get<double>();
      s.reward.r_l = row.at("r_l").get<double>();
      s.reward.r_d = row.at("r_d").get<double>();
      s.reward.r_s = row.at("r_s").get<double>();
      s.reward.total = row.at("total").get<double>();
      s.reason = reason_from(row.at("done_reason").get<std::string>());
      if (row.contains("ball")) s.ball = BallState{row["ball"].at(0).get<double>(), row["ball"].at(1).get<double>()};
      for (const json& sp : row.at("setpoints")) s.setpoints.push_back(setpoint_from(sp));
      tr.steps.push_back(std::move(s));
    }
    for (const json& sp : j.at("braking")) tr.braking.push_back(setpoint_from(sp));
    return tr;
  } catch (const json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const int dim = static_cast<int>(trace.start.p.size());
  out << "t";
  for (const char* col : {"action", "a_next", "p", "v", "a"}) {
    for (int j = 0; j < dim; ++j) out << ',' << col << j;
  }
  out << ",progress,l,d,r_l,r_d,r_s,total,done_reason\n";
  out.precision(17);
  for (const TraceStep& s : trace.steps) {
    out << s.t;
    for (const JointVector* v : {&s.action, &s.a_next, &s.state.p, &s.state.v, &s.state.a}) {
      for (int j = 0; j < dim; ++j) out << ',' << (*v)[j];
    }
    out << ',' << s.progress << ',' << s.reward.l << ',' << s.reward.d << ',' << s.reward.r_l << ','
        << s.reward.r_d << ',' << s.reward.r_s << ',' << s.reward.total << ','
        << to_string(s.reason) << '\n';
  }
}

KinematicState replay_trace(Env& env, const CubicPath& path, const Trace& trace) {
  env.reset(path, trace.start);
  for (const TraceStep& s : trace.steps) {
    if (env.done()) throw PreconditionError("replay_trace: episode ended before the trace did");
    env.step(Action{s.action});
  }
  KinematicState state = env.state();
  for (const Segment& seg : brake_to_rest(state, env.limits(), env.config().dt, env.config().substeps)) {
    state = {seg.setpoints.back().p, seg.setpoints.back().v, seg.setpoints.back().a};
  }
  return state;
}

}  // namespace ptrack
