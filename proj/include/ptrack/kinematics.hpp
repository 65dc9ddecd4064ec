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
#include <vector>

#include <Eigen/Geometry>

#include "ptrack/types.hpp"

namespace ptrack {

struct ChainJoint {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();         // unit rotation axis in the joint frame
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // m, to the next frame
};

/// Serial chain of revolute joints. Frame i+1 = frame i * Rot(axis_i, q_i) *
/// Trans(translation_i); the reference point sits at tcp_offset in the last
/// frame.
struct ChainSpec {
  Eigen::Vector3d base_position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  std::vector<ChainJoint> joints;
  Eigen::Vector3d tcp_offset = Eigen::Vector3d::Zero();

  int dimension() const { return static_cast<int>(joints.size()); }
  /// Throws ConfigError when an axis is not unit-norm to 1e-9.
  void validate(const std::string& context = "chain") const;
  /// Sum of translation lengths and the TCP offset.
  double reach() const;
};

struct Pose {
  Eigen::Vector3d position;
  Eigen::Quaterniond orientation;
};

/// Throws PreconditionError on a dimension mismatch.
Pose fk(const ChainSpec& chain, const JointVector& q);

/// Angle in [0, pi] between body_axis rotated by `orientation` and
/// `reference_axis`.
double orientation_angle(const Eigen::Quaterniond& orientation,
                         const Eigen::Vector3d& reference_axis,
                         const Eigen::Vector3d& body_axis = Eigen::Vector3d::UnitZ());

/// Angle of the relative rotation between two orientations, in [0, pi].
double rotation_distance(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

}  // namespace ptrack
