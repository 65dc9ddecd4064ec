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
#include "ptrack/kinematics.hpp"

#include <cmath>

namespace ptrack {

void ChainSpec::validate(const std::string& context) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const double n = joints[i].axis.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9) {
      throw ConfigError(context + ".joints[" + std::to_string(i) + "].axis: must be unit-norm");
    }
    if (!joints[i].translation.allFinite()) {
      throw ConfigError(context + ".joints[" + std::to_string(i) + "].translation: must be finite");
    }
  }
  if (!tcp_offset.allFinite()) throw ConfigError(context + ".tcp: must be finite");
  if (std::abs(base_orientation.norm() - 1.0) > 1e-9) {
    throw ConfigError(context + ".base.orientation: must be a unit quaternion");
  }
}

double ChainSpec::reach() const {
  double r = tcp_offset.norm();
  for (const auto& j : joints) r += j.translation.norm();
  return r;
}

Pose fk(const ChainSpec& chain, const JointVector& q) {
  if (q.size() != chain.dimension()) {
    throw PreconditionError("fk: got " + std::to_string(q.size()) + " joint values for a " +
                            std::to_string(chain.dimension()) + "-joint chain");
  }
  Eigen::Quaterniond rot = chain.base_orientation;
  Eigen::Vector3d pos = chain.base_position;
  for (int i = 0; i < chain.dimension(); ++i) {
    const ChainJoint& j = chain.joints[static_cast<std::size_t>(i)];
    rot = rot * Eigen::Quaterniond(Eigen::AngleAxisd(q[i], j.axis));
    pos += rot * j.translation;
  }
  pos += rot * chain.tcp_offset;
  rot.normalize();
  return {pos, rot};
}

double orientation_angle(const Eigen::Quaterniond& orientation,
                         const Eigen::Vector3d& reference_axis,
                         const Eigen::Vector3d& body_axis) {
  const Eigen::Vector3d a = (orientation * body_axis).normalized();
  const Eigen::Vector3d b = reference_axis.normalized();
  // atan2 keeps full precision near 0 and pi.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double rotation_distance(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  const Eigen::Quaterniond rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

}  // namespace ptrack
