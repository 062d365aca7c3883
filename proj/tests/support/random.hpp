#pragma once

#include <random>

#include "arm/geometry/camera.hpp"
#include "arm/geometry/pose.hpp"

namespace arm::testing {

inline geometry::Quaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  geometry::Quaternion q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

inline geometry::Pose random_pose(std::mt19937_64& rng, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return {geometry::Vec3(u(rng), u(rng), u(rng)), random_quaternion(rng)};
}

/// Seeded camera looking roughly at the origin from 0.5-1.5 units away.
inline geometry::CameraModel random_camera(std::mt19937_64& rng, int width = 64, int height = 48) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const geometry::Vec3 eye(u(rng), u(rng) - 1.5, 0.5 + 0.5 * (u(rng) + 1.0));
  return geometry::CameraModel::look_at(eye, geometry::Vec3(0.1 * u(rng), 0.1 * u(rng), 0.0),
                                        geometry::Vec3::UnitZ(), width, height, 0.9 * width + 10.0 * u(rng));
}

/// Smooth positive depth map with a few invalid pixels.
inline std::vector<double> random_depth(std::mt19937_64& rng, int width, int height) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double base = 0.3 + u(rng), ax = 0.2 * u(rng), ay = 0.2 * u(rng);
  std::vector<double> d(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = base + ax * std::sin(0.2 * c) + ay * std::cos(0.15 * r) + 0.01 * u(rng);
      if (u(rng) < 0.05) v = 0.0;
      d[static_cast<std::size_t>(r) * width + c] = v;
    }
  }
  return d;
}

}  // namespace arm::testing
