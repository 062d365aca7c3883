#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arm/geometry/pose.hpp"

namespace arm::sim {

using geometry::Pose;
using geometry::Quaternion;
using geometry::Vec3;

struct Workspace {
  Vec3 lo{-0.25, -0.25, 0.0};
  Vec3 hi{0.25, 0.25, 0.35};

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 half_extent() const { return 0.5 * (hi - lo); }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

using Color = std::array<std::uint8_t, 3>;

enum class ObjectKind { kBlock, kBin };

/// Boxes only; `size` holds full extents along the object's local axes.
struct Object {
  int id = 0;
  std::string name;
  ObjectKind kind = ObjectKind::kBlock;
  Vec3 size{0.05, 0.05, 0.05};
  Color color{200, 40, 40};
  Pose pose;
  bool graspable = true;

  Vec3 half() const { return 0.5 * size; }
  /// World-frame axis-aligned bounds.
  void aabb(Vec3& lo, Vec3& hi) const;
  double top() const;
  /// Whether world point p lies over the footprint of this object (local x/y test).
  bool over_footprint(const Vec3& p) const;
};

inline constexpr double kGripperHalfWidth = 0.04;
inline constexpr double kGraspRadius = 1.5 * kGripperHalfWidth;
inline constexpr double kBlockSize = 0.05;

struct WorldState {
  std::vector<Object> objects;
  Pose ee;
  bool gripper_open = true;
  std::optional<int> held;  // index into objects
  Pose held_offset;         // object pose relative to the end effector
  int step_count = 0;

  const Object* find(const std::string& name) const;
  /// Moves the end effector; a held object follows rigidly.
  void move_ee(const Pose& target);
  /// Closes the gripper, attaching the nearest graspable object within the grasp radius.
  void close_gripper();
  /// Opens the gripper and drops any held object onto the surface below it.
  void open_gripper(const Workspace& ws);
  void set_gripper(bool open, const Workspace& ws) { open ? open_gripper(ws) : close_gripper(); }
};

/// Height of the highest surface under (x, y), ignoring object `skip`.
double support_height(const WorldState& state, const Vec3& p, int skip);

/// Yaw-only orientation, canonicalized.
Quaternion yaw_rotation(double yaw);

}  // namespace arm::sim
