#include "arm/sim/env.hpp"

#include "arm/errors.hpp"

namespace arm::sim {

EnvConfig EnvConfig::from_config(const util::Config& cfg) {
  EnvConfig c;
  c.task = parse_task(cfg.get<std::string>("task", to_string(c.task)));
  c.image_size = cfg.get<int>("image_size", c.image_size);
  c.step_budget = cfg.get<int>("step_budget", c.step_budget);
  if (auto v = cfg.get_optional<std::string>("workspace_min")) c.workspace.lo = util::parse_vec3(*v);
  if (auto v = cfg.get_optional<std::string>("workspace_max")) c.workspace.hi = util::parse_vec3(*v);
  if (auto v = cfg.get_optional<std::string>("draw_gripper")) c.draw_gripper = util::parse_bool(*v);
  if (c.image_size < 8 || c.step_budget < 1) throw ContractError("invalid environment config");
  if (!(c.workspace.lo.array() < c.workspace.hi.array()).all()) throw ContractError("empty workspace");
  return c;
}

void EnvConfig::to_config(util::Config& cfg) const {
  cfg.put("task", to_string(task));
  cfg.put("image_size", image_size);
  cfg.put("step_budget", step_budget);
  cfg.put("workspace_min", util::format_vec3(workspace.lo));
  cfg.put("workspace_max", util::format_vec3(workspace.hi));
  cfg.put("draw_gripper", draw_gripper ? "on" : "off");
}

Env::Env(EnvConfig config)
    : config_(config), task_(make_task(config.task, config.step_budget)), camera_(default_camera(config.image_size)) {}

Observation Env::observe() const { return render(state_, camera_, RenderOptions{config_.draw_gripper}); }

Observation Env::reset(std::uint64_t seed) {
  state_ = WorldState{};
  state_.objects = task_.generate(seed, config_.workspace);
  state_.ee = kHomePose;
  terminal_ = false;
  return observe();
}

StepResult Env::step(const PoseAction& action) {
  if (terminal_) throw EpisodeFinished("step() called on a finished episode");
  StepResult out;
  const control::MotionResult motion = control::plan_to_pose(state_, action.target, config_.workspace);
  ++state_.step_count;
  if (!motion.reached) {
    out.reward = -1.0;
    out.terminal = true;
    out.failure = motion.failure;
  } else {
    for (const Pose& w : motion.waypoints) state_.move_ee(w);
    state_.set_gripper(action.gripper < 0.5, config_.workspace);
    if (task_.success(state_)) {
      out.reward = 1.0;
      out.terminal = true;
    } else {
      out.terminal = state_.step_count >= task_.max_steps;
    }
  }
  terminal_ = out.terminal;
  out.observation = observe();
  return out;
}

Observation Env::apply_waypoint(const Pose& pose, bool gripper_open) {
  state_.move_ee(pose);
  state_.set_gripper(gripper_open, config_.workspace);
  return observe();
}

}  // namespace arm::sim
