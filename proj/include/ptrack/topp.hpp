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

#include <vector>

#include "ptrack/limits.hpp"
#include "ptrack/spline.hpp"

namespace ptrack {

/// Joint acceleration written in terms of the squared path speed x = sdot^2
/// and the path acceleration u = sddot: lo <= x_coef * x + u_coef * u <= hi.
struct Halfplane {
  double x_coef = 0.0;
  double u_coef = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct StageConstraints {
  double x_max = 0.0;
  std::vector<Halfplane> halfplanes;
};

/// Path derivatives below this magnitude are treated as zero.
inline constexpr double kToppDerivativeFloor = 1e-12;

StageConstraints stage_constraints(const CubicPath& path, double s, const RobotLimits& limits);

struct ToppResult {
  std::vector<double> grid;         // s_i, K + 1 entries
  std::vector<double> x;            // sdot_i^2
  std::vector<double> controllable; // backward-pass upper bounds on x_i
  std::vector<double> u;            // constant path acceleration on stage i, K entries
  std::vector<double> stage_durations;
  double duration = 0.0;
};

/// Rest-to-rest time-optimal parameterization on a uniform K-stage grid.
/// Throws RuntimeFailure naming the first stage with an empty admissible set.
ToppResult backward_forward(const CubicPath& path, const RobotLimits& limits, int K);

struct ToppSample {
  double t = 0.0;
  JointVector p, v, a;
};

/// Joint trajectory at the grid points of `result`.
std::vector<ToppSample> reconstruct(const CubicPath& path, const ToppResult& result);

}  // namespace ptrack
