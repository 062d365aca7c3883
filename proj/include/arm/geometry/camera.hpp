#pragma once

#include <cstdint>
#include <vector>

#include "arm/geometry/pose.hpp"

namespace arm::geometry {

/// Pinhole camera, x right / y down / z forward in the camera frame. Extrinsics
/// map camera coordinates to world coordinates.
struct CameraModel {
  Mat3 intrinsics = Mat3::Identity();
  Mat4 extrinsics = Mat4::Identity();
  int width = 0;
  int height = 0;

  double fx() const { return intrinsics(0, 0); }
  double fy() const { return intrinsics(1, 1); }
  double cx() const { return intrinsics(0, 2); }
  double cy() const { return intrinsics(1, 2); }

  /// Throws ContractError when an invariant does not hold.
  void validate() const;

  /// Camera at `eye` looking at `target`, fx = fy = focal, principal point at the image center.
  static CameraModel look_at(const Vec3& eye, const Vec3& target, const Vec3& up, int width, int height,
                             double focal);
};

struct PixelProjection {
  double u = 0;  // column
  double v = 0;  // row
  bool in_front = false;
};

PixelProjection project_to_pixel(const Vec3& p_world, const CameraModel& cam);

/// World point seen at pixel (u, v) with camera-frame depth `depth`.
Vec3 deproject_pixel(double u, double v, double depth, const CameraModel& cam);

/// H x W x 3 world points (row-major, xyz interleaved) with a validity mask.
struct OrganizedCloud {
  int width = 0;
  int height = 0;
  std::vector<double> points;
  std::vector<std::uint8_t> valid;

  Vec3 at(int row, int col) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(row) * width + col);
    return {points[i], points[i + 1], points[i + 2]};
  }
};

/// depth is row-major H x W; values <= 0 are invalid and map to the zero point.
OrganizedCloud depth_to_organized_cloud(const std::vector<double>& depth, int height, int width,
                                        const CameraModel& cam);

}  // namespace arm::geometry
