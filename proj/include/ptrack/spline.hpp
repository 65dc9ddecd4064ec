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

#include <cstddef>
#include <vector>

#include "ptrack/types.hpp"

namespace ptrack {

enum class Parameterization { kChord, kUniform };
enum class KnotSampling { kDistance, kCurvature };
/// kNotAKnot: third derivative continuous at the second and second-to-last
/// knots. kNatural: zero second derivative at both ends.
enum class EndCondition { kNotAKnot, kNatural };

/// Joint-space interpolating cubic spline through a list of knots, reparameterized
/// by joint-space arc length.
///
/// The spline is built over an internal parameter u (chord length or knot
/// index); all public queries except the *_param variants take the arc
/// length s in [0, total_length()] and clamp outside of it. Instances are
/// immutable after construction.
class CubicPath {
 public:
  /// Throws PreconditionError on fewer than two knots, mismatched dimensions,
  /// or (chord parameterization only) two identical consecutive knots.
  static CubicPath build(const std::vector<JointVector>& knots,
                         Parameterization parameterization = Parameterization::kChord,
                         EndCondition end = EndCondition::kNotAKnot);

  int dimension() const { return dimension_; }
  std::size_t knot_count() const { return knots_.size(); }
  const std::vector<JointVector>& knots() const { return knots_; }
  const std::vector<double>& knot_params() const { return knot_params_; }
  /// Arc length at each knot; front() == 0, back() == total_length().
  const std::vector<double>& knot_arc_lengths() const { return knot_arc_; }
  double total_length() const { return table_s_.back(); }

  JointVector eval(double s) const;
  /// dq/ds; unit norm wherever the path is regular.
  JointVector tangent(double s) const;
  /// d^2q/ds^2.
  JointVector second_derivative(double s) const;
  /// Norm of d^2q/ds^2 over all joints.
  double curvature(double s) const;

  /// Internal parameter with arc_at_param(u) == s.
  double param_at(double s) const;
  double arc_at_param(double u) const;
  JointVector eval_param(double u) const;
  JointVector derivative_param(double u) const;
  JointVector second_derivative_param(double u) const;

 private:
  struct Segment {
    // q(u) = c0 + c1 t + c2 t^2 + c3 t^3, t = u - u_i.
    JointVector c0, c1, c2, c3;
  };

  std::size_t segment_index(double u) const;
  double speed_param(double u) const;
  double arc_between(double u0, double u1) const;

  int dimension_ = 0;
  std::vector<JointVector> knots_;
  std::vector<double> knot_params_;
  std::vector<double> knot_arc_;
  std::vector<Segment> segments_;
  // Monotone lookup table u -> s, refined within each segment.
  std::vector<double> table_u_;
  std::vector<double> table_s_;
};

inline CubicPath build_path(const std::vector<JointVector>& knots,
                            Parameterization parameterization = Parameterization::kChord,
                            EndCondition end = EndCondition::kNotAKnot) {
  return CubicPath::build(knots, parameterization, end);
}

/// Number of grid intervals used for the cumulative curvature integral.
inline constexpr int kCurvatureGrid = 1000;
/// Total integrated curvature below which curvature sampling falls back to
/// distance sampling.
inline constexpr double kStraightPathCurvature = 1e-9;

/// Arc lengths of `n` knots placed along `path` by the given strategy.
std::vector<double> sample_arc_lengths(const CubicPath& path, int n, KnotSampling strategy);
/// Joint positions at sample_arc_lengths(path, n, strategy).
std::vector<JointVector> sample_knots(const CubicPath& path, int n, KnotSampling strategy);

/// The N knots of `path` describing the upcoming part of the path as seen
/// from `progress`.
struct KnotWindow {
  std::vector<JointVector> knots;
  /// Arc length from the current path position to the last window knot.
  double l_state = 0.0;
  /// Arc length from the first window knot to the current path position.
  double offset = 0.0;
  std::size_t start_index = 0;
};

KnotWindow knot_window(const CubicPath& path, double progress, int n);
/// Same rule over an explicit knot list with arc lengths \`arcs\` (ascending,
/// arcs.front() == 0).
KnotWindow knot_window(const std::vector<JointVector>& knots, const std::vector<double>& arcs,
                       double progress, int n);

}  // namespace ptrack
