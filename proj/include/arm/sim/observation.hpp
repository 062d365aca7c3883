#pragma once

#include <cstdint>
#include <vector>

#include "arm/geometry/pose.hpp"

namespace arm::sim {

struct Proprio {
  geometry::Pose ee;
  double gripper_open = 1.0;  // 1 open, 0 closed
};

/// RGB is H x W x 3 bytes, cloud H x W x 3 world-frame points, row-major.
struct Observation {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  std::vector<float> cloud;
  std::vector<std::uint8_t> valid;
  Proprio proprio;

  friend bool operator==(const Observation& a, const Observation& b);
};

}  // namespace arm::sim
