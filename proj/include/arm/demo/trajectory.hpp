#pragma once

// Demonstration trajectories and their on-disk container.
//
// File layout, all little-endian:
//   magic "ARMTRAJ\0" | u32 version (1) | u32 task id | u64 seed | u8 success
//   u32 width | u32 height | f64[9] intrinsics (row-major) | f64[16] extrinsics (row-major)
//   u32 frame count, then per frame:
//     u8[H*W*3] rgb | f32[H*W*3] cloud | u8[H*W] validity
//     f64[3] ee translation | f64[4] ee rotation (x y z w) | u8 gripper open
//     f64[3] action translation | f64[4] action rotation (x y z w) | f64 action gripper
//     f64 velocity
//   u64 FNV-1a checksum of everything above
// World-state snapshots are not stored; loaded trajectories carry empty states.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "arm/geometry/camera.hpp"
#include "arm/sim/env.hpp"

namespace arm::demo {

struct TrajectoryStep {
  sim::WorldState state;
  std::shared_ptr<const sim::Observation> observation;
  sim::PoseAction action;  // the command that produced this frame
  double velocity = 0.0;   // |translation(t) - translation(t-1)|, 0 for the first frame
};

struct Trajectory {
  sim::TaskId task = sim::TaskId::kLiftBlock;
  std::uint64_t seed = 0;
  geometry::CameraModel camera;
  std::vector<TrajectoryStep> steps;
  bool success = false;

  int size() const { return static_cast<int>(steps.size()); }
  const sim::Observation& observation(int t) const { return *steps[t].observation; }
  const geometry::Pose& ee_pose(int t) const { return steps[t].observation->proprio.ee; }
  bool gripper_open(int t) const { return steps[t].observation->proprio.gripper_open > 0.5; }
  double velocity(int t) const { return steps[t].velocity; }

  /// Appends a frame, computing its velocity from the previous one.
  void append(const sim::WorldState& state, sim::Observation obs, const sim::PoseAction& action);
};

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace arm::demo
