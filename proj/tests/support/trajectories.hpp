#pragma once

#include <memory>
#include <random>
#include <vector>

#include "arm/demo/keyframes.hpp"
#include "arm/demo/trajectory.hpp"
#include "arm/sim/render.hpp"

namespace arm::testing {

/// Trajectory along +x whose per-step velocities and gripper flags are given
/// directly; observations carry proprioception only.
inline demo::Trajectory hand_built(const std::vector<double>& velocity, const std::vector<char>& gripper_open) {
  demo::Trajectory traj;
  traj.camera = sim::default_camera(64);
  traj.success = true;
  geometry::Vec3 p(-0.2, 0.0, 0.1);
  for (std::size_t t = 0; t < velocity.size(); ++t) {
    if (t > 0) p.x() += velocity[t];
    auto obs = std::make_shared<sim::Observation>();
    obs->proprio.ee.translation = p;
    obs->proprio.gripper_open = gripper_open[t] ? 1.0 : 0.0;
    demo::TrajectoryStep step;
    step.observation = obs;
    step.action.target = obs->proprio.ee;
    step.velocity = t == 0 ? 0.0 : velocity[t];
    traj.steps.push_back(step);
  }
  return traj;
}

/// Literal scan of the keyframe rules.
inline std::vector<int> brute_force_keyframes(const std::vector<double>& v, const std::vector<char>& g, double eps) {
  std::vector<int> out;
  const int n = static_cast<int>(v.size());
  for (int t = 0; t < n; ++t) {
    const bool toggle = t > 0 && g[t] != g[t - 1];
    const bool stop = t > 0 && v[t] < eps && v[t - 1] >= eps;
    const bool last = t == n - 1;
    if (toggle || stop || last) out.push_back(t);
  }
  return out;
}

/// Random profile with gripper toggles and low-velocity runs of varying length.
inline void random_profile(std::mt19937_64& rng, int length, std::vector<double>& v, std::vector<char>& g) {
  std::uniform_real_distribution<double> fast(1e-3, 0.02), slow(0.0, 1e-3 * 0.999), u(0.0, 1.0);
  v.assign(length, 0.0);
  g.assign(length, 1);
  bool open = true, moving = true;
  for (int t = 0; t < length; ++t) {
    if (u(rng) < 0.08) open = !open;
    if (u(rng) < 0.15) moving = !moving;
    g[t] = open;
    v[t] = moving ? fast(rng) : slow(rng);
  }
  v[0] = 0.0;
}

}  // namespace arm::testing
