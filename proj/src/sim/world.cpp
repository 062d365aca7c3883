#include "arm/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arm::sim {

void Object::aabb(Vec3& lo, Vec3& hi) const {
  const geometry::Mat3 r = pose.rotation.toRotationMatrix();
  const Vec3 ext = r.cwiseAbs() * half();
  lo = pose.translation - ext;
  hi = pose.translation + ext;
}

double Object::top() const {
  Vec3 lo, hi;
  aabb(lo, hi);
  return hi.z();
}

bool Object::over_footprint(const Vec3& p) const {
  const Vec3 local = pose.rotation.conjugate() * (p - pose.translation);
  return std::abs(local.x()) <= half().x() && std::abs(local.y()) <= half().y();
}

const Object* WorldState::find(const std::string& name) const {
  for (const auto& o : objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

void WorldState::move_ee(const Pose& target) {
  ee = target;
  if (held) objects[*held].pose = geometry::compose(ee, held_offset);
}

void WorldState::close_gripper() {
  if (!gripper_open) return;
  gripper_open = false;
  double best = std::numeric_limits<double>::infinity();
  std::optional<int> pick;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (!objects[i].graspable) continue;
    const double d = (objects[i].pose.translation - ee.translation).norm();
    if (d <= kGraspRadius && d < best) {
      best = d;
      pick = static_cast<int>(i);
    }
  }
  if (pick) {
    held = pick;
    held_offset = geometry::relative_pose(ee, objects[*pick].pose);
  }
}

void WorldState::open_gripper(const Workspace& ws) {
  if (gripper_open) return;
  gripper_open = true;
  if (!held) return;
  Object& o = objects[*held];
  const int idx = *held;
  held.reset();
  Vec3 p = o.pose.translation;
  const double margin = 0.5 * std::max(o.size.x(), o.size.y());
  p.x() = std::clamp(p.x(), ws.lo.x() + margin, ws.hi.x() - margin);
  p.y() = std::clamp(p.y(), ws.lo.y() + margin, ws.hi.y() - margin);
  const Quaternion q = o.pose.rotation;
  const Vec3 fwd = q * Vec3::UnitX();
  o.pose.rotation = yaw_rotation(std::atan2(fwd.y(), fwd.x()));
  p.z() = support_height(*this, p, idx) + o.half().z();
  o.pose.translation = p;
}

double support_height(const WorldState& state, const Vec3& p, int skip) {
  double h = 0.0;
  for (std::size_t i = 0; i < state.objects.size(); ++i) {
    if (static_cast<int>(i) == skip || (state.held && *state.held == static_cast<int>(i))) continue;
    const Object& o = state.objects[i];
    if (o.over_footprint(p)) h = std::max(h, o.top());
  }
  return h;
}

Quaternion yaw_rotation(double yaw) {
  return geometry::canonicalize(Quaternion(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));
}

}  // namespace arm::sim
