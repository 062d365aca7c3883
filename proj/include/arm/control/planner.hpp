#pragma once

#include <optional>
#include <vector>

#include "arm/sim/world.hpp"

namespace arm::control {

using geometry::Pose;

enum class FailureReason { kOutOfWorkspace, kBlocked };

const char* to_string(FailureReason r);

struct PlannerConfig {
  double step = 0.02;    // max translation between consecutive waypoints
  double margin = 0.02;  // obstacle inflation
};

struct MotionResult {
  std::vector<Pose> waypoints;  // includes the endpoint, excludes the start
  bool reached = false;
  std::optional<FailureReason> failure;
};

/// Straight-line motion with slerped orientation. When the segment passes through
/// an inflated object box the path lifts vertically, crosses over, and descends.
/// Objects containing the start or goal, and any held object, are not obstacles.
MotionResult plan_to_pose(const sim::WorldState& state, const Pose& goal, const sim::Workspace& workspace,
                          const PlannerConfig& config = {});

/// Whether segment [a, b] intersects the box [lo, hi].
bool segment_hits_box(const geometry::Vec3& a, const geometry::Vec3& b, const geometry::Vec3& lo,
                      const geometry::Vec3& hi);

}  // namespace arm::control
