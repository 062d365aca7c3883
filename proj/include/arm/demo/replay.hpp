#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "arm/demo/keyframes.hpp"

namespace arm::demo {

struct Transition {
  std::shared_ptr<const sim::Observation> observation;
  Pixel attention;
  sim::PoseAction action;
  std::optional<std::array<double, 8>> raw_action;  // the policy's pre-mapping action, when known
  double reward = 0.0;  // unscaled environment reward
  std::shared_ptr<const sim::Observation> next_observation;
  bool terminal = false;
  bool demo = false;
};

/// Transitions from every M-th frame of each keyframe segment to the segment's
/// closing keyframe; the first segment starts at frame 0. Throws ContractError
/// when `kf` does not describe `traj`.
std::vector<Transition> augment_demo(const Trajectory& traj, const KeyframeSet& kf, int stride);

/// Closed-form count of augment_demo's output.
std::size_t augmented_count(std::span<const int> keyframes, int stride);

/// Demo transitions are kept apart and never evicted; agent transitions form a
/// FIFO ring over the remaining capacity. One writer and one reader may use the
/// buffer concurrently.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  /// Not safe while another thread uses `other`.
  ReplayBuffer(ReplayBuffer&& other) noexcept;

  /// Throws ContractError when demos alone would exceed the capacity.
  void add(Transition t);

  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t demo_count() const;
  std::size_t agent_count() const;

  /// n uniform draws with replacement. Throws ContractError when empty.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;
  std::vector<Transition> sample(std::size_t n, std::uint64_t seed) const;

  /// Snapshot of every stored transition, demos first.
  std::vector<Transition> contents() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::vector<Transition> demos_;
  std::deque<Transition> agent_;
};

}  // namespace arm::demo
