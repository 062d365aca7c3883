#pragma once

#include "arm/demo/trajectory.hpp"

namespace arm::demo {

struct TeacherConfig {
  double max_speed = 0.02;  // per step
  double accel = 0.005;     // per step^2
  double pregrasp_height = 0.10;
  double lift_height = 0.20;
  double transit_height = 0.15;
};

/// Runs the task's scripted program (pre-grasp, grasp, close, lift, then transit
/// and open where the task needs it) with a trapezoidal speed profile. Every
/// rendered frame is a trajectory step; each program waypoint gets a zero-velocity
/// hold frame and each gripper toggle its own frame. Throws DemoGenerationError
/// when the program fails.
Trajectory generate_demo(const sim::EnvConfig& env_config, std::uint64_t seed, const TeacherConfig& config = {});

/// Distances travelled per step along a path of the given length.
std::vector<double> trapezoid_steps(double length, double max_speed, double accel);

}  // namespace arm::demo
