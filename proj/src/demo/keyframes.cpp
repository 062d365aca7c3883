#include "arm/demo/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arm/errors.hpp"

namespace arm::demo {

std::string rule_names(unsigned rules) {
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (!(rules & bit)) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(kGripperChange, "gripper");
  add(kVelocityStop, "velocity");
  add(kFinalFrame, "final");
  return out.empty() ? "-" : out;
}

std::vector<unsigned> keyframe_rules(std::span<const double> velocity, std::span<const char> gripper_open,
                                     double eps_v) {
  if (velocity.size() != gripper_open.size()) throw ShapeError("velocity and gripper series differ in length");
  const std::size_t n = velocity.size();
  std::vector<unsigned> rules(n, 0);
  for (std::size_t t = 1; t < n; ++t) {
    if (gripper_open[t] != gripper_open[t - 1]) rules[t] |= kGripperChange;
    if (velocity[t] < eps_v && velocity[t - 1] >= eps_v) rules[t] |= kVelocityStop;
  }
  if (n > 0) rules[n - 1] |= kFinalFrame;
  return rules;
}

Pixel project_clamped(const geometry::Vec3& p, const geometry::CameraModel& cam) {
  const auto proj = geometry::project_to_pixel(p, cam);
  auto clamp_round = [](double v, int size) {
    if (!std::isfinite(v)) return 0;
    return static_cast<int>(std::clamp(std::lround(v), 0L, static_cast<long>(size - 1)));
  };
  return {clamp_round(proj.u, cam.width), clamp_round(proj.v, cam.height)};
}

KeyframeSet discover_keyframes(const Trajectory& traj, double eps_v) {
  if (traj.steps.empty()) throw ContractError("cannot discover keyframes of an empty trajectory");
  std::vector<double> velocity;
  std::vector<char> gripper;
  for (int t = 0; t < traj.size(); ++t) {
    velocity.push_back(traj.velocity(t));
    gripper.push_back(traj.gripper_open(t) ? 1 : 0);
  }
  const auto rules = keyframe_rules(velocity, gripper, eps_v);
  KeyframeSet kf;
  for (int t = 0; t < traj.size(); ++t) {
    if (rules[t]) {
      kf.indices.push_back(t);
      kf.rules.push_back(rules[t]);
    }
  }
  for (std::size_t i = 0; i < kf.indices.size(); ++i) {
    const int next = kf.indices[std::min(i + 1, kf.indices.size() - 1)];
    kf.labels.push_back(project_clamped(traj.ee_pose(next).translation, traj.camera));
  }
  return kf;
}

std::string format_keyframes(const KeyframeSet& kf) {
  std::ostringstream out;
  out << "index\trule\tlabel_x\tlabel_y\n";
  for (std::size_t i = 0; i < kf.indices.size(); ++i) {
    out << kf.indices[i] << '\t' << rule_names(kf.rules[i]) << '\t' << kf.labels[i].x << '\t' << kf.labels[i].y
        << '\n';
  }
  return out.str();
}

}  // namespace arm::demo
