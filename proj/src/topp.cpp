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
#include "ptrack/topp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ptrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear bound u >= base + slope * x (lower) or u <= base + slope * x (upper).
struct LinearBound {
  double base, slope;
};

struct StageBounds {
  std::vector<LinearBound> lower, upper;
  double x_hi = kInf;
};

StageBounds stage_bounds(const StageConstraints& c) {
  StageBounds out;
  out.x_hi = c.x_max;
  for (const Halfplane& h : c.halfplanes) {
    if (std::abs(h.u_coef) < kToppDerivativeFloor) {
      // Pure bound on x: lo <= x_coef * x <= hi with lo < 0 < hi.
      if (h.x_coef > kToppDerivativeFloor) out.x_hi = std::min(out.x_hi, h.hi / h.x_coef);
      if (h.x_coef < -kToppDerivativeFloor) out.x_hi = std::min(out.x_hi, h.lo / h.x_coef);
      continue;
    }
    const LinearBound lo{h.lo / h.u_coef, -h.x_coef / h.u_coef};
    const LinearBound hi{h.hi / h.u_coef, -h.x_coef / h.u_coef};
    if (h.u_coef > 0.0) {
      out.lower.push_back(lo);
      out.upper.push_back(hi);
    } else {
      out.lower.push_back(hi);
      out.upper.push_back(lo);
    }
  }
  return out;
}

double u_min(const StageBounds& b, double x) {
  double u = -kInf;
  for (const auto& l : b.lower) u = std::max(u, l.base + l.slope * x);
  return u;
}

double u_max(const StageBounds& b, double x) {
  double u = kInf;
  for (const auto& l : b.upper) u = std::min(u, l.base + l.slope * x);
  return u;
}

// Shrinks [lo, hi] by a * x <= c.
void restrict(double a, double c, double& lo, double& hi) {
  if (a > 0.0) {
    hi = std::min(hi, c / a);
  } else if (a < 0.0) {
    lo = std::max(lo, c / a);
  } else if (c < 0.0) {
    lo = kInf;
  }
}

}  // namespace

StageConstraints stage_constraints(const CubicPath& path, double s, const RobotLimits& limits) {
  const JointVector d1 = path.tangent(s);
  const JointVector d2 = path.second_derivative(s);
  StageConstraints out;
  out.x_max = kInf;
  for (std::size_t j = 0; j < limits.size(); ++j) {
    const Eigen::Index k = static_cast<Eigen::Index>(j);
    const JointLimits& l = limits[j];
    if (std::abs(d1[k]) >= kToppDerivativeFloor) {
      const double v_bound = d1[k] > 0.0 ? l.v_max : -l.v_min;
      const double r = v_bound / std::abs(d1[k]);
      out.x_max = std::min(out.x_max, r * r);
    }
    out.halfplanes.push_back({d2[k], d1[k], l.a_min, l.a_max});
  }
  return out;
}

ToppResult backward_forward(const CubicPath& path, const RobotLimits& limits, int K) {
  if (K < 16) throw PreconditionError("TOPP grid needs K >= 16, got " + std::to_string(K));
  if (path.dimension() != static_cast<int>(limits.size())) {
    throw PreconditionError("TOPP: path has " + std::to_string(path.dimension()) +
                            " joints, limits have " + std::to_string(limits.size()));
  }
  const double total = path.total_length();
  ToppResult out;
  out.grid.resize(static_cast<std::size_t>(K) + 1);
  for (int i = 0; i <= K; ++i) out.grid[i] = total * i / K;
  if (total <= 0.0) {
    out.x.assign(out.grid.size(), 0.0);
    out.controllable = out.x;
    out.u.assign(static_cast<std::size_t>(K), 0.0);
    out.stage_durations.assign(static_cast<std::size_t>(K), 0.0);
    return out;
  }
  const double ds = total / K;

  std::vector<StageBounds> bounds;
  bounds.reserve(static_cast<std::size_t>(K) + 1);
  for (int i = 0; i <= K; ++i) bounds.push_back(stage_bounds(stage_constraints(path, out.grid[i], limits)));

  // Backward pass: largest x_i from which some admissible u lands in [0, C_{i+1}].
  std::vector<double>& c = out.controllable;
  c.assign(static_cast<std::size_t>(K) + 1, 0.0);
  for (int i = K - 1; i >= 0; --i) {
    const StageBounds& b = bounds[i];
    double lo = 0.0;
    double hi = b.x_hi;
    for (const auto& l : b.lower) {
      for (const auto& u : b.upper) restrict(l.slope - u.slope, u.base - l.base, lo, hi);
      // x + 2 ds (base + slope x) <= C_{i+1}
      restrict(1.0 + 2.0 * ds * l.slope, c[i + 1] - 2.0 * ds * l.base, lo, hi);
    }
    for (const auto& u : b.upper) {
      // x + 2 ds (base + slope x) >= 0
      restrict(-(1.0 + 2.0 * ds * u.slope), 2.0 * ds * u.base, lo, hi);
    }
    if (!(lo <= hi * (1.0 + 1e-12) + 1e-15) || !std::isfinite(lo)) {
      throw RuntimeFailure("TOPP infeasible at stage " + std::to_string(i) + " (s = " +
                           std::to_string(out.grid[i]) + ")");
    }
    c[i] = std::max(0.0, hi);
  }

  // Forward pass: greedy maximal path acceleration.
  out.x.assign(static_cast<std::size_t>(K) + 1, 0.0);
  out.u.assign(static_cast<std::size_t>(K), 0.0);
  out.stage_durations.assign(static_cast<std::size_t>(K), 0.0);
  for (int i = 0; i < K; ++i) {
    const double xi = out.x[i];
    const double u_hi = u_max(bounds[i], xi);
    const double u_lo = u_min(bounds[i], xi);
    double next = xi + 2.0 * ds * u_hi;
    next = std::min(next, c[i + 1]);
    next = std::max(next, std::max(0.0, xi + 2.0 * ds * u_lo));
    if (i + 1 == K) next = 0.0;
    out.x[i + 1] = next;
    out.u[i] = (next - xi) / (2.0 * ds);
    const double denom = std::sqrt(xi) + std::sqrt(next);
    if (denom <= 0.0) {
      throw RuntimeFailure("TOPP stalls at stage " + std::to_string(i) + " (zero path speed)");
    }
    out.stage_durations[i] = 2.0 * ds / denom;
    out.duration += out.stage_durations[i];
  }
  return out;
}

std::vector<ToppSample> reconstruct(const CubicPath& path, const ToppResult& result) {
  std::vector<ToppSample> out;
  double t = 0.0;
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const double s = result.grid[i];
    const double x = result.x[i];
    const double u = i < result.u.size() ? result.u[i] : result.u.back();
    const JointVector d1 = path.tangent(s);
    out.push_back({t, path.eval(s), d1 * std::sqrt(x), path.second_derivative(s) * x + d1 * u});
    if (i < result.stage_durations.size()) t += result.stage_durations[i];
  }
  return out;
}

}  // namespace ptrack
