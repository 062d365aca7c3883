#pragma once

#include <span>
#include <string>
#include <vector>

#include "arm/demo/trajectory.hpp"

namespace arm::demo {

inline constexpr double kDefaultVelocityThreshold = 1e-3;
inline constexpr int kDefaultAugmentStride = 5;

/// Pixel coordinates: x is the column, y the row, origin top-left.
struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

enum KeyframeRule : unsigned {
  kGripperChange = 1u << 0,
  kVelocityStop = 1u << 1,
  kFinalFrame = 1u << 2,
};

std::string rule_names(unsigned rules);

struct KeyframeSet {
  std::vector<int> indices;
  std::vector<unsigned> rules;  // KeyframeRule bits that fired, per keyframe
  std::vector<Pixel> labels;    // next keyframe's end effector in this frame; the last labels itself
};

/// Rule bits for every frame; zero for frames that are not keyframes.
std::vector<unsigned> keyframe_rules(std::span<const double> velocity, std::span<const char> gripper_open,
                                     double eps_v);

/// Throws ContractError for an empty trajectory.
KeyframeSet discover_keyframes(const Trajectory& traj, double eps_v = kDefaultVelocityThreshold);

/// Projection of a world point into the camera, rounded and clamped to the image.
Pixel project_clamped(const geometry::Vec3& p, const geometry::CameraModel& cam);

/// Tab-separated listing: index, rules, label x, label y.
std::string format_keyframes(const KeyframeSet& kf);

}  // namespace arm::demo
