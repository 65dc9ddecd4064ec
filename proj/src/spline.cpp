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

#include "ptrack/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace ptrack {

namespace {

// Table resolution inside each spline segment.
constexpr int kPiecesPerSegment = 16;
constexpr double kQuadratureRelTol = 1e-12;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <typename F>
double gauss_legendre(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    sum += kGlWeights[i] * f(mid + half * kGlNodes[i]);
  }
  return sum * half;
}

template <typename F>
double adaptive_gauss_legendre(const F& f, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  const double refined = left + right;
  if (depth >= 40 || std::abs(refined - whole) <= kQuadratureRelTol * std::max(std::abs(refined), 1e-300)) {
    return refined;
  }
  return adaptive_gauss_legendre(f, a, mid, left, depth + 1) +
         adaptive_gauss_legendre(f, mid, b, right, depth + 1);
}

// Second derivatives M[i] = q''(u_i) of all joints at once. Interior rows
// are the usual C2 conditions; the end rows depend on the end condition and
// are folded into a tridiagonal system solved with the Thomas algorithm.
std::vector<JointVector> spline_second_derivatives(const std::vector<JointVector>& y,
                                                   const std::vector<double>& u,
                                                   EndCondition end) {
  const std::size_t n = y.size();
  const Eigen::Index dim = y.front().size();
  std::vector<JointVector> m(n, JointVector::Zero(dim));
  if (n < 3) return m;
  if (n == 3 && end == EndCondition::kNotAKnot) {
    // Not-a-knot through three points is the interpolating parabola.
    const double h0 = u[1] - u[0];
    const double h1 = u[2] - u[1];
    const JointVector curv = 2.0 * ((y[2] - y[1]) / h1 - (y[1] - y[0]) / h0) / (h0 + h1);
    for (auto& mi : m) mi = curv;
    return m;
  }

  const std::size_t inner = n - 2;
  std::vector<double> diag(inner), upper(inner), lower(inner);
  std::vector<JointVector> rhs(inner);
  for (std::size_t k = 0; k < inner; ++k) {
    const std::size_t i = k + 1;
    const double h0 = u[i] - u[i - 1];
    const double h1 = u[i + 1] - u[i];
    lower[k] = h0;
    diag[k] = 2.0 * (h0 + h1);
    upper[k] = h1;
    rhs[k] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  if (end == EndCondition::kNotAKnot) {
    // Third derivative continuous at u_1: M0 = ((h0 + h1) M1 - h0 M2) / h1.
    const double h0 = u[1] - u[0];
    const double h1 = u[2] - u[1];
    diag[0] += h0 * (h0 + h1) / h1;
    upper[0] -= h0 * h0 / h1;
    // And at u_{n-2}: M_{n-1} = ((a + b) M_{n-2} - b M_{n-3}) / a.
    const double a = u[n - 2] - u[n - 3];
    const double b = u[n - 1] - u[n - 2];
    diag[inner - 1] += b * (a + b) / a;
    lower[inner - 1] -= b * b / a;
  }
  for (std::size_t k = 1; k < inner; ++k) {
    const double w = lower[k] / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  m[inner] = rhs[inner - 1] / diag[inner - 1];
  for (std::size_t k = inner - 1; k-- > 0;) {
    m[k + 1] = (rhs[k] - upper[k] * m[k + 2]) / diag[k];
  }
  if (end == EndCondition::kNotAKnot) {
    const double h0 = u[1] - u[0];
    const double h1 = u[2] - u[1];
    m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
    const double a = u[n - 2] - u[n - 3];
    const double b = u[n - 1] - u[n - 2];
    m[n - 1] = ((a + b) * m[n - 2] - b * m[n - 3]) / a;
  }
  return m;
}

}  // namespace

CubicPath CubicPath::build(const std::vector<JointVector>& knots,
                           Parameterization parameterization, EndCondition end) {
  if (knots.size() < 2) {
    throw PreconditionError("cubic path needs at least 2 knots, got " +
                            std::to_string(knots.size()));
  }
  const Eigen::Index dim = knots.front().size();
  if (dim < 1) throw PreconditionError("cubic path knots must have dimension >= 1");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].size() != dim) {
      throw PreconditionError("knot " + std::to_string(i) + " has dimension " +
                              std::to_string(knots[i].size()) + ", expected " +
                              std::to_string(dim));
    }
    if (!knots[i].allFinite()) {
      throw PreconditionError("knot " + std::to_string(i) + " is not finite");
    }
  }

  CubicPath path;
  path.dimension_ = static_cast<int>(dim);
  path.knots_ = knots;
  path.knot_params_.resize(knots.size());
  path.knot_params_[0] = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    double step = 1.0;
    if (parameterization == Parameterization::kChord) {
      step = (knots[i] - knots[i - 1]).norm();
      if (step <= 0.0) {
        throw PreconditionError("knots " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                " coincide; chord parameterization needs distinct knots");
      }
    }
    path.knot_params_[i] = path.knot_params_[i - 1] + step;
  }

  const auto& u = path.knot_params_;
  const auto m = spline_second_derivatives(knots, u, end);
  path.segments_.resize(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double h = u[i + 1] - u[i];
    Segment& seg = path.segments_[i];
    seg.c0 = knots[i];
    seg.c1 = (knots[i + 1] - knots[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
    seg.c2 = m[i] / 2.0;
    seg.c3 = (m[i + 1] - m[i]) / (6.0 * h);
  }

  const auto speed = [&path](double x) { return path.speed_param(x); };
  path.table_u_.reserve(path.segments_.size() * kPiecesPerSegment + 1);
  path.table_s_.reserve(path.table_u_.capacity());
  path.knot_arc_.assign(knots.size(), 0.0);
  path.table_u_.push_back(0.0);
  path.table_s_.push_back(0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < path.segments_.size(); ++i) {
    const double h = u[i + 1] - u[i];
    for (int k = 0; k < kPiecesPerSegment; ++k) {
      const double a = u[i] + h * k / kPiecesPerSegment;
      const double b = (k + 1 == kPiecesPerSegment) ? u[i + 1] : u[i] + h * (k + 1) / kPiecesPerSegment;
      s += adaptive_gauss_legendre(speed, a, b, gauss_legendre(speed, a, b), 0);
      path.table_u_.push_back(b);
      path.table_s_.push_back(s);
    }
    path.knot_arc_[i + 1] = s;
  }
  return path;
}

std::size_t CubicPath::segment_index(double u) const {
  const auto it = std::upper_bound(knot_params_.begin(), knot_params_.end(), u);
  std::size_t idx = static_cast<std::size_t>(std::distance(knot_params_.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, segments_.size() - 1);
}

JointVector CubicPath::eval_param(double u) const {
  u = std::clamp(u, knot_params_.front(), knot_params_.back());
  const std::size_t i = segment_index(u);
  const Segment& seg = segments_[i];
  const double t = u - knot_params_[i];
  return seg.c0 + t * (seg.c1 + t * (seg.c2 + t * seg.c3));
}

JointVector CubicPath::derivative_param(double u) const {
  u = std::clamp(u, knot_params_.front(), knot_params_.back());
  const std::size_t i = segment_index(u);
  const Segment& seg = segments_[i];
  const double t = u - knot_params_[i];
  return seg.c1 + t * (2.0 * seg.c2 + 3.0 * t * seg.c3);
}

JointVector CubicPath::second_derivative_param(double u) const {
  u = std::clamp(u, knot_params_.front(), knot_params_.back());
  const std::size_t i = segment_index(u);
  const Segment& seg = segments_[i];
  const double t = u - knot_params_[i];
  return 2.0 * seg.c2 + 6.0 * t * seg.c3;
}

double CubicPath::speed_param(double u) const {
  const std::size_t i = segment_index(u);
  const Segment& seg = segments_[i];
  const double t = u - knot_params_[i];
  double sq = 0.0;
  for (int j = 0; j < dimension_; ++j) {
    const double d = seg.c1[j] + t * (2.0 * seg.c2[j] + 3.0 * t * seg.c3[j]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

double CubicPath::arc_between(double u0, double u1) const {
  return gauss_legendre([this](double x) { return speed_param(x); }, u0, u1);
}

double CubicPath::arc_at_param(double u) const {
  u = std::clamp(u, knot_params_.front(), knot_params_.back());
  const auto it = std::upper_bound(table_u_.begin(), table_u_.end(), u);
  std::size_t k = static_cast<std::size_t>(std::distance(table_u_.begin(), it));
  k = k == 0 ? 0 : k - 1;
  if (k + 1 >= table_u_.size()) return table_s_.back();
  return table_s_[k] + arc_between(table_u_[k], u);
}

double CubicPath::param_at(double s) const {
  const double total = total_length();
  if (s <= 0.0 || total <= 0.0) return knot_params_.front();
  if (s >= total) return knot_params_.back();

  const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
  std::size_t k = static_cast<std::size_t>(std::distance(table_s_.begin(), it));
  k = std::min(k == 0 ? 0 : k - 1, table_s_.size() - 2);
  const double s0 = table_s_[k];
  const double s1 = table_s_[k + 1];
  double lo = table_u_[k];
  double hi = table_u_[k + 1];
  if (s1 <= s0) return lo;

  const double target = s - s0;
  const double tol = 1e-13 * std::max(total, 1e-300);
  // Safeguarded Newton on F(u) = arc(u_k, u) - target, bracketed by [lo, hi].
  double x = lo + (hi - lo) * target / (s1 - s0);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = arc_between(table_u_[k], x) - target;
    if (std::abs(f) <= tol) break;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = speed_param(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

JointVector CubicPath::eval(double s) const { return eval_param(param_at(s)); }

JointVector CubicPath::tangent(double s) const {
  const JointVector d = derivative_param(param_at(s));
  const double n = d.norm();
  if (n <= 0.0) return JointVector::Zero(dimension_);
  return d / n;
}

JointVector CubicPath::second_derivative(double s) const {
  const double u = param_at(s);
  const JointVector d1 = derivative_param(u);
  const JointVector d2 = second_derivative_param(u);
  const double sq = d1.squaredNorm();
  if (sq <= 0.0) return JointVector::Zero(dimension_);
  const JointVector t = d1 / std::sqrt(sq);
  return (d2 - t.dot(d2) * t) / sq;
}

double CubicPath::curvature(double s) const { return second_derivative(s).norm(); }

std::vector<double> sample_arc_lengths(const CubicPath& path, int n, KnotSampling strategy) {
  if (n < 2) throw PreconditionError("knot sampling needs n >= 2, got " + std::to_string(n));
  const double total = path.total_length();
  std::vector<double> out(static_cast<std::size_t>(n));

  if (strategy == KnotSampling::kCurvature) {
    std::vector<double> cumulative(kCurvatureGrid + 1, 0.0);
    double prev = path.curvature(0.0);
    for (int g = 1; g <= kCurvatureGrid; ++g) {
      const double kappa = path.curvature(total * g / kCurvatureGrid);
      cumulative[g] = cumulative[g - 1] + 0.5 * (prev + kappa) * total / kCurvatureGrid;
      prev = kappa;
    }
    const double k_total = cumulative.back();
    if (k_total >= kStraightPathCurvature) {
      out.front() = 0.0;
      out.back() = total;
      for (int k = 1; k + 1 < n; ++k) {
        const double target = k_total * k / (n - 1);
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
        const int g = std::clamp(static_cast<int>(std::distance(cumulative.begin(), it)), 1,
                                 kCurvatureGrid);
        const double k0 = cumulative[g - 1];
        const double k1 = cumulative[g];
        const double frac = k1 > k0 ? (target - k0) / (k1 - k0) : 0.0;
        out[k] = total * (g - 1 + frac) / kCurvatureGrid;
      }
      return out;
    }
  }

  for (int k = 0; k < n; ++k) out[k] = total * k / (n - 1);
  out.back() = total;
  return out;
}

std::vector<JointVector> sample_knots(const CubicPath& path, int n, KnotSampling strategy) {
  const auto arcs = sample_arc_lengths(path, n, strategy);
  std::vector<JointVector> knots;
  knots.reserve(arcs.size());
  for (double s : arcs) knots.push_back(path.eval(s));
  return knots;
}

KnotWindow knot_window(const std::vector<JointVector>& knots, const std::vector<double>& arcs,
                       double progress, int n) {
  if (n < 1) throw PreconditionError("knot window size must be >= 1");
  if (knots.size() < 2 || knots.size() != arcs.size()) {
    throw PreconditionError("knot window needs >= 2 knots with one arc length each");
  }
  progress = std::clamp(progress, 0.0, arcs.back());

  // Last knot at or before the current position, but never the final knot so
  // the window always starts at the knot preceding the position.
  const auto it = std::upper_bound(arcs.begin(), arcs.end(), progress);
  std::size_t start = static_cast<std::size_t>(std::distance(arcs.begin(), it));
  start = start == 0 ? 0 : start - 1;
  start = std::min(start, knots.size() - 2);

  KnotWindow window;
  window.start_index = start;
  window.knots.reserve(static_cast<std::size_t>(n));
  std::size_t last = start;
  for (int k = 0; k < n; ++k) {
    const std::size_t idx = std::min(start + static_cast<std::size_t>(k), knots.size() - 1);
    window.knots.push_back(knots[idx]);
    last = idx;
  }
  window.offset = std::max(0.0, progress - arcs[start]);
  window.l_state = std::max(0.0, arcs[last] - progress);
  return window;
}

KnotWindow knot_window(const CubicPath& path, double progress, int n) {
  return knot_window(path.knots(), path.knot_arc_lengths(), progress, n);
}

}  // namespace ptrack
