#include "arm/demo/teacher.hpp"

#include <algorithm>
#include <cmath>

#include "arm/errors.hpp"

namespace arm::demo {

using geometry::Pose;
using geometry::Vec3;

std::vector<double> trapezoid_steps(double length, double max_speed, double accel) {
  std::vector<double> steps;
  double travelled = 0.0, v = 0.0;
  while (length - travelled > 1e-12) {
    const double remaining = length - travelled;
    v = std::min({v + accel, max_speed, std::max(std::sqrt(2.0 * accel * remaining), accel)});
    v = std::min(v, remaining);
    travelled += v;
    steps.push_back(v);
  }
  return steps;
}

namespace {

struct ProgramStep {
  Pose pose;
  bool gripper_open;
};

class Recorder {
 public:
  Recorder(sim::Env& env, Trajectory& traj, const TeacherConfig& cfg) : env_(env), traj_(traj), cfg_(cfg) {}

  void move_to(const Pose& goal, bool gripper_open) {
    const auto motion = control::plan_to_pose(env_.state(), goal, env_.config().workspace);
    if (!motion.reached) {
      throw DemoGenerationError(std::string("teacher motion failed: ") + control::to_string(*motion.failure),
                                traj_.seed);
    }
    std::vector<Pose> path{env_.state().ee};
    path.insert(path.end(), motion.waypoints.begin(), motion.waypoints.end());
    std::vector<double> arc{0.0};
    for (std::size_t i = 1; i < path.size(); ++i)
      arc.push_back(arc.back() + (path[i].translation - path[i - 1].translation).norm());
    const double total = arc.back();
    const Pose start = path.front();
    double s = 0.0;
    std::size_t seg = 1;
    for (double d : trapezoid_steps(total, cfg_.max_speed, cfg_.accel)) {
      s = std::min(total, s + d);
      while (seg + 1 < path.size() && arc[seg] < s) ++seg;
      const double len = arc[seg] - arc[seg - 1];
      const double f = len > 0 ? (s - arc[seg - 1]) / len : 1.0;
      Pose p;
      p.translation = path[seg - 1].translation + f * (path[seg].translation - path[seg - 1].translation);
      p.rotation = geometry::canonicalize(start.rotation.slerp(total > 0 ? s / total : 1.0, goal.rotation));
      frame(p, gripper_open);
    }
    frame(goal, gripper_open);  // hold: zero velocity at the program waypoint
  }

  void set_gripper(bool open) { frame(env_.state().ee, open); }

  void frame(const Pose& pose, bool gripper_open) {
    sim::Observation obs = env_.apply_waypoint(pose, gripper_open);
    traj_.append(env_.state(), std::move(obs), sim::PoseAction{pose, gripper_open ? 0.0 : 1.0});
  }

 private:
  sim::Env& env_;
  Trajectory& traj_;
  const TeacherConfig& cfg_;
};

Pose at(const Vec3& p) { return Pose{p, geometry::Quaternion::Identity()}; }

Vec3 above(const sim::Object& o, double z) {
  return Vec3(o.pose.translation.x(), o.pose.translation.y(), z);
}

}  // namespace

Trajectory generate_demo(const sim::EnvConfig& env_config, std::uint64_t seed, const TeacherConfig& config) {
  sim::Env env(env_config);
  Trajectory traj;
  traj.task = env_config.task;
  traj.seed = seed;
  traj.camera = env.camera();
  sim::Observation first = env.reset(seed);
  traj.append(env.state(), std::move(first), sim::PoseAction{env.state().ee, 0.0});

  Recorder rec(env, traj, config);
  const sim::WorldState& s = env.state();
  const std::string target = env_config.task == sim::TaskId::kStackBlock ? "block_a" : "block";
  const sim::Object* obj = s.find(target);
  if (!obj) throw DemoGenerationError("task has no '" + target + "' object", seed);
  const Vec3 grasp = obj->pose.translation;

  rec.move_to(at(grasp + Vec3(0, 0, config.pregrasp_height)), true);
  rec.move_to(at(grasp), true);
  rec.set_gripper(false);
  rec.move_to(at(Vec3(grasp.x(), grasp.y(), config.lift_height)), false);
  if (env_config.task != sim::TaskId::kLiftBlock) {
    const sim::Object* dest = s.find(env_config.task == sim::TaskId::kStackBlock ? "block_b" : "bin");
    if (!dest) throw DemoGenerationError("task has no destination object", seed);
    rec.move_to(at(above(*dest, config.transit_height)), false);
    rec.set_gripper(true);
  }
  traj.success = env.task().success(env.state());
  if (!traj.success) throw DemoGenerationError("scripted program did not complete the task", seed);
  return traj;
}

}  // namespace arm::demo
