#include "arm/geometry/camera.hpp"

#include <cmath>

#include "arm/errors.hpp"

namespace arm::geometry {

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw ContractError("camera size must be positive");
  if (!(fx() > 0 && fy() > 0)) throw ContractError("camera focal lengths must be positive");
  if (!(cx() >= 0 && cx() < width && cy() >= 0 && cy() < height)) {
    throw ContractError("principal point outside the image");
  }
  const Mat3 r = extrinsics.topLeftCorner<3, 3>();
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-7 || std::abs(r.determinant() - 1) > 1e-7) {
    throw ContractError("camera extrinsics rotation is not proper orthonormal");
  }
}

CameraModel CameraModel::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
                                 double focal) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.intrinsics << focal, 0, (width - 1) / 2.0, 0, focal, (height - 1) / 2.0, 0, 0, 1;
  cam.extrinsics.setIdentity();
  cam.extrinsics.block<3, 1>(0, 0) = x;
  cam.extrinsics.block<3, 1>(0, 1) = y;
  cam.extrinsics.block<3, 1>(0, 2) = z;
  cam.extrinsics.block<3, 1>(0, 3) = eye;
  return cam;
}

PixelProjection project_to_pixel(const Vec3& p_world, const CameraModel& cam) {
  const Mat3 r = cam.extrinsics.topLeftCorner<3, 3>();
  const Vec3 t = cam.extrinsics.topRightCorner<3, 1>();
  const Vec3 pc = r.transpose() * (p_world - t);
  PixelProjection out;
  out.in_front = pc.z() > 0;
  if (pc.z() == 0) return out;
  out.u = cam.fx() * pc.x() / pc.z() + cam.cx();
  out.v = cam.fy() * pc.y() / pc.z() + cam.cy();
  return out;
}

Vec3 deproject_pixel(double u, double v, double depth, const CameraModel& cam) {
  const Vec3 pc((u - cam.cx()) * depth / cam.fx(), (v - cam.cy()) * depth / cam.fy(), depth);
  return cam.extrinsics.topLeftCorner<3, 3>() * pc + cam.extrinsics.topRightCorner<3, 1>();
}

OrganizedCloud depth_to_organized_cloud(const std::vector<double>& depth, int height, int width,
                                        const CameraModel& cam) {
  if (height != cam.height || width != cam.width ||
      depth.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw ShapeError("depth map size does not match the camera");
  }
  OrganizedCloud cloud;
  cloud.width = width;
  cloud.height = height;
  cloud.points.assign(depth.size() * 3, 0.0);
  cloud.valid.assign(depth.size(), 0);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * width + col;
      const double d = depth[i];
      if (!(d > 0) || !std::isfinite(d)) continue;
      const Vec3 p = deproject_pixel(col, row, d, cam);
      cloud.points[3 * i] = p.x();
      cloud.points[3 * i + 1] = p.y();
      cloud.points[3 * i + 2] = p.z();
      cloud.valid[i] = 1;
    }
  }
  return cloud;
}

}  // namespace arm::geometry
