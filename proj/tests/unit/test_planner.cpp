#include <doctest.h>

#include <cmath>
#include <random>

#include "arm/control/planner.hpp"
#include "arm/geometry/pose.hpp"
#include "support/random.hpp"

using namespace arm;
using namespace arm::control;
using geometry::Quaternion;
using geometry::Vec3;

namespace {

sim::Object box_at(const Vec3& center, const Vec3& size) {
  sim::Object o;
  o.name = "box";
  o.size = size;
  o.pose.translation = center;
  return o;
}

void check_continuity(const sim::WorldState& s, const MotionResult& m, double step) {
  Vec3 prev = s.ee.translation;
  for (const Pose& w : m.waypoints) {
    CHECK((w.translation - prev).norm() <= step + 1e-9);
    prev = w.translation;
  }
}

}  // namespace

TEST_CASE("goal equal to the current pose is a single waypoint") {
  sim::WorldState s;
  s.ee.translation = Vec3(0.05, -0.02, 0.2);
  const MotionResult m = plan_to_pose(s, s.ee, sim::Workspace{});
  CHECK(m.reached);
  CHECK_FALSE(m.failure.has_value());
  REQUIRE(m.waypoints.size() == 1);
  CHECK((m.waypoints[0].translation - s.ee.translation).norm() == 0.0);
}

TEST_CASE("goals outside the workspace fail") {
  sim::WorldState s;
  s.ee.translation = Vec3(0, 0, 0.2);
  for (const Vec3& g : {Vec3(0.3, 0, 0.1), Vec3(0, -0.26, 0.1), Vec3(0, 0, -0.01), Vec3(0, 0, 0.4)}) {
    const MotionResult m = plan_to_pose(s, Pose{g, Quaternion::Identity()}, sim::Workspace{});
    CHECK_FALSE(m.reached);
    CHECK(m.waypoints.empty());
    REQUIRE(m.failure.has_value());
    CHECK(*m.failure == FailureReason::kOutOfWorkspace);
  }
  CHECK(std::string(to_string(FailureReason::kOutOfWorkspace)) == "out_of_workspace");
}

TEST_CASE("reached plans end at the goal with bounded steps and shortest-arc rotation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.2, 0.2), h(0.0, 0.3);
  for (int i = 0; i < 300; ++i) {
    sim::WorldState s;
    s.ee.translation = Vec3(u(rng), u(rng), h(rng));
    s.ee.rotation = testing::random_quaternion(rng);
    const Pose goal{Vec3(u(rng), u(rng), h(rng)), testing::random_quaternion(rng)};
    const MotionResult m = plan_to_pose(s, goal, sim::Workspace{});
    REQUIRE(m.reached);
    CHECK((m.waypoints.back().translation - goal.translation).norm() < 1e-6);
    CHECK(geometry::angle_between(m.waypoints.back().rotation, goal.rotation) < 1e-6);
    check_continuity(s, m, 0.02);
    double traversed = 0.0;
    Quaternion prev = s.ee.rotation;
    for (const Pose& w : m.waypoints) {
      traversed += geometry::angle_between(prev, w.rotation);
      prev = w.rotation;
    }
    CHECK(traversed <= geometry::angle_between(s.ee.rotation, goal.rotation) + 1e-6);
  }
}

TEST_CASE("blocked straight paths detour over the obstacle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  const PlannerConfig cfg;
  for (int i = 0; i < 50; ++i) {
    sim::WorldState s;
    s.objects.push_back(box_at(Vec3(u(rng), u(rng), 0.04), Vec3(0.06, 0.06, 0.08)));
    s.ee.translation = Vec3(-0.15, u(rng), 0.03);
    const Pose goal{Vec3(0.15, u(rng), 0.03), Quaternion::Identity()};
    Vec3 lo, hi;
    s.objects[0].aabb(lo, hi);
    REQUIRE(segment_hits_box(s.ee.translation, goal.translation, lo, hi));
    const MotionResult m = plan_to_pose(s, goal, sim::Workspace{}, cfg);
    REQUIRE(m.reached);
    CHECK(m.waypoints.size() > 15);
    check_continuity(s, m, cfg.step);
    Vec3 prev = s.ee.translation;
    const Vec3 lo_m = lo.array() - (cfg.margin - 1e-9), hi_m = hi.array() + (cfg.margin - 1e-9);
    for (const Pose& w : m.waypoints) {
      CHECK_FALSE(segment_hits_box(prev, w.translation, lo_m, hi_m));
      prev = w.translation;
    }
    CHECK(plan_to_pose(s, goal, sim::Workspace{}, cfg).waypoints.size() == m.waypoints.size());
  }
}

TEST_CASE("held objects and objects at the goal are not obstacles") {
  sim::WorldState s;
  s.objects.push_back(box_at(Vec3(0, 0, 0.025), Vec3(0.05, 0.05, 0.05)));
  s.ee.translation = Vec3(-0.15, 0, 0.025);
  const Pose into{Vec3(0, 0, 0.025), Quaternion::Identity()};
  const MotionResult m = plan_to_pose(s, into, sim::Workspace{});
  CHECK(m.reached);
  CHECK(m.waypoints.size() == 8);
  s.held = 0;
  const MotionResult through = plan_to_pose(s, Pose{Vec3(0.15, 0, 0.025), Quaternion::Identity()}, sim::Workspace{});
  CHECK(through.reached);
  CHECK(through.waypoints.size() == 15);
}

TEST_CASE("segment box intersection") {
  const Vec3 lo(-1, -1, -1), hi(1, 1, 1);
  CHECK(segment_hits_box(Vec3(-2, 0, 0), Vec3(2, 0, 0), lo, hi));
  CHECK_FALSE(segment_hits_box(Vec3(-2, 0, 0), Vec3(-1.5, 0, 0), lo, hi));
  CHECK_FALSE(segment_hits_box(Vec3(-2, 2, 0), Vec3(2, 2, 0), lo, hi));
  CHECK(segment_hits_box(Vec3(0, 0, 0), Vec3(0, 0, 0), lo, hi));
  CHECK(segment_hits_box(Vec3(-2, -2, 0), Vec3(2, 2, 0), lo, hi));
}
