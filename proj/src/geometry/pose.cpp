#include "arm/geometry/pose.hpp"

#include <algorithm>
#include <cmath>

#include "arm/errors.hpp"

namespace arm::geometry {

Quaternion canonicalize(const Quaternion& q) {
  const double n = q.norm();
  if (!(n > 1e-12)) throw DegenerateQuaternion("cannot canonicalize a zero-norm quaternion");
  Eigen::Vector4d c = q.coeffs() / n;  // x, y, z, w
  bool flip = c[3] < 0;
  if (c[3] == 0) {
    for (int i = 0; i < 3; ++i) {
      if (c[i] != 0) {
        flip = c[i] < 0;
        break;
      }
    }
  }
  if (flip) c = -c;
  c[3] = std::abs(c[3]);  // avoid -0
  return Quaternion(c[3], c[0], c[1], c[2]);
}

double angle_between(const Quaternion& a, const Quaternion& b) {
  const double d = std::abs(a.normalized().dot(b.normalized()));
  return 2.0 * std::acos(std::clamp(d, 0.0, 1.0));
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation.normalized().toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::from_matrix(const Mat4& m) {
  Pose p;
  p.translation = m.topRightCorner<3, 1>();
  p.rotation = canonicalize(Quaternion(Mat3(m.topLeftCorner<3, 3>())));
  return p;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose r;
  r.translation = a.rotation * b.translation + a.translation;
  r.rotation = canonicalize(a.rotation * b.rotation);
  return r;
}

Pose inverse(const Pose& p) {
  Pose r;
  r.rotation = canonicalize(p.rotation.conjugate());
  r.translation = -(r.rotation * p.translation);
  return r;
}

Pose relative_pose(const Pose& a, const Pose& b) { return compose(inverse(a), b); }

}  // namespace arm::geometry
