#include "arm/control/planner.hpp"

#include <algorithm>
#include <cmath>

namespace arm::control {

using geometry::Vec3;

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::kOutOfWorkspace:
      return "out_of_workspace";
    case FailureReason::kBlocked:
      return "blocked";
  }
  return "unknown";
}

bool segment_hits_box(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi) {
  const Vec3 d = b - a;
  double t0 = 0.0, t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (a[k] < lo[k] || a[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - a[k]) / d[k];
    double tb = (hi[k] - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

namespace {

bool inside(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

struct Box {
  Vec3 lo, hi;
};

}  // namespace

MotionResult plan_to_pose(const sim::WorldState& state, const Pose& goal, const sim::Workspace& workspace,
                          const PlannerConfig& config) {
  MotionResult result;
  if (!workspace.contains(goal.translation)) {
    result.failure = FailureReason::kOutOfWorkspace;
    return result;
  }
  const Vec3 start = state.ee.translation;
  const Vec3 end = goal.translation;

  std::vector<Box> obstacles;
  for (std::size_t i = 0; i < state.objects.size(); ++i) {
    if (state.held && *state.held == static_cast<int>(i)) continue;
    Box b;
    state.objects[i].aabb(b.lo, b.hi);
    if (inside(start, b.lo, b.hi) || inside(end, b.lo, b.hi)) continue;
    b.lo.array() -= config.margin;
    b.hi.array() += config.margin;
    obstacles.push_back(b);
  }

  std::vector<Vec3> corners{start};
  bool blocked_direct = false;
  double clear_z = std::max(start.z(), end.z());
  for (const Box& b : obstacles) {
    if (segment_hits_box(start, end, b.lo, b.hi)) {
      blocked_direct = true;
    }
  }
  if (blocked_direct) {
    // Lift above every obstacle the raised path could cross.
    for (const Box& b : obstacles) clear_z = std::max(clear_z, b.hi.z());
    if (clear_z > workspace.hi.z()) {
      result.failure = FailureReason::kBlocked;
      return result;
    }
    corners.push_back(Vec3(start.x(), start.y(), clear_z));
    corners.push_back(Vec3(end.x(), end.y(), clear_z));
  }
  corners.push_back(end);

  std::vector<Vec3> points;
  for (std::size_t s = 0; s + 1 < corners.size(); ++s) {
    const Vec3 a = corners[s], b = corners[s + 1];
    const double len = (b - a).norm();
    if (len == 0) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / config.step - 1e-9)));
    for (int k = 1; k <= pieces; ++k) points.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  if (points.empty()) points.push_back(end);

  double total = 0;
  std::vector<double> arc{0.0};
  Vec3 prev = start;
  for (const Vec3& p : points) {
    total += (p - prev).norm();
    arc.push_back(total);
    prev = p;
  }
  const geometry::Quaternion q0 = state.ee.rotation;
  const geometry::Quaternion q1 = goal.rotation;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double f = total > 0 ? arc[k + 1] / total : 1.0;
    Pose w;
    w.translation = points[k];
    w.rotation = geometry::canonicalize(q0.slerp(f, q1));
    result.waypoints.push_back(w);
  }
  result.waypoints.back() = goal;
  result.reached = true;
  return result;
}

}  // namespace arm::control
