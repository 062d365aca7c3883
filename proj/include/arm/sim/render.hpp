#pragma once

#include "arm/geometry/camera.hpp"
#include "arm/sim/observation.hpp"
#include "arm/sim/world.hpp"

namespace arm::sim {

inline constexpr Color kBackground{25, 25, 30};
inline constexpr Color kTableColor{170, 150, 120};
inline constexpr double kTableHalfExtent = 0.4;

struct RenderOptions {
  bool draw_gripper = true;
};

/// Default desk camera: in front of and above the table, looking down at it.
geometry::CameraModel default_camera(int image_size);

/// Ray-cast rasterization: nearest hit per pixel center, flat colors per face.
Observation render(const WorldState& state, const geometry::CameraModel& cam, const RenderOptions& options = {});

/// Boxes drawn for the gripper at its current pose and opening.
std::vector<Object> gripper_geometry(const WorldState& state);

}  // namespace arm::sim
