#pragma once

#include <cstdint>
#include <optional>

#include "arm/control/planner.hpp"
#include "arm/geometry/camera.hpp"
#include "arm/sim/observation.hpp"
#include "arm/sim/render.hpp"
#include "arm/sim/tasks.hpp"
#include "arm/util/config.hpp"

namespace arm::sim {

/// Next-best-pose action. The gripper closes iff gripper >= 0.5.
struct PoseAction {
  Pose target;
  double gripper = 0.0;
};

struct EnvConfig {
  TaskId task = TaskId::kLiftBlock;
  int image_size = 64;
  int step_budget = 10;
  Workspace workspace;
  bool draw_gripper = true;

  static EnvConfig from_config(const util::Config& cfg);
  /// Writes every field, so from_config(to_config()) reproduces this value.
  void to_config(util::Config& cfg) const;
  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

inline const Pose kHomePose{Vec3(0.0, 0.0, 0.25), Quaternion::Identity()};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminal = false;
  std::optional<control::FailureReason> failure;
};

class Env {
 public:
  explicit Env(EnvConfig config);

  /// Throws PlacementError when the generator cannot place the scene.
  Observation reset(std::uint64_t seed);
  /// One macro-step: plan, move, then apply the gripper command.
  StepResult step(const PoseAction& action);
  /// Fine-grained motion used by the scripted teacher; does not count as a macro-step.
  Observation apply_waypoint(const Pose& pose, bool gripper_open);

  Observation observe() const;
  const WorldState& state() const { return state_; }
  const geometry::CameraModel& camera() const { return camera_; }
  const EnvConfig& config() const { return config_; }
  const TaskSpec& task() const { return task_; }
  bool terminal() const { return terminal_; }
  bool succeeded() const { return task_.success(state_); }

 private:
  EnvConfig config_;
  TaskSpec task_;
  geometry::CameraModel camera_;
  WorldState state_;
  bool terminal_ = true;
};

}  // namespace arm::sim
