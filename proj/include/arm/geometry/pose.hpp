#pragma once

#include <Eigen/Geometry>

namespace arm::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
/// Layout (x, y, z, w); w is the scalar part.
using Quaternion = Eigen::Quaterniond;

/// Unit norm with w >= 0; when w == 0 the first nonzero of (x, y, z) is made
/// positive. Throws DegenerateQuaternion for norm <= 1e-12.
Quaternion canonicalize(const Quaternion& q);

/// Rotation angle in [0, pi] between two orientations.
double angle_between(const Quaternion& a, const Quaternion& b);

struct Pose {
  Vec3 translation = Vec3::Zero();
  Quaternion rotation = Quaternion::Identity();

  static Pose identity() { return {}; }
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Mat4 matrix() const;
  static Pose from_matrix(const Mat4& m);
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);
/// The pose r with compose(a, r) == b.
Pose relative_pose(const Pose& a, const Pose& b);

}  // namespace arm::geometry
