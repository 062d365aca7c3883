#include "arm/demo/replay.hpp"

#include "arm/errors.hpp"

namespace arm::demo {

std::size_t augmented_count(std::span<const int> keyframes, int stride) {
  std::size_t n = 0;
  int start = 0;
  for (int k : keyframes) {
    if (k > start) n += static_cast<std::size_t>((k - start + stride - 1) / stride);
    start = k;
  }
  return n;
}

std::vector<Transition> augment_demo(const Trajectory& traj, const KeyframeSet& kf, int stride) {
  if (stride < 1) throw ContractError("augmentation stride must be at least 1");
  if (kf.indices.empty() || kf.indices.back() != traj.size() - 1) {
    throw ContractError("keyframes do not end at this trajectory's final frame");
  }
  for (std::size_t i = 0; i < kf.indices.size(); ++i) {
    if (kf.indices[i] < 0 || (i > 0 && kf.indices[i] <= kf.indices[i - 1])) {
      throw ContractError("keyframe indices must be strictly increasing and in range");
    }
  }
  std::vector<Transition> out;
  int start = 0;
  for (int k : kf.indices) {
    const geometry::Pose& target = traj.ee_pose(k);
    sim::PoseAction action;
    action.target.translation = target.translation;
    action.target.rotation = geometry::canonicalize(target.rotation);
    action.gripper = traj.gripper_open(k) ? 0.0 : 1.0;
    const bool final = k == traj.size() - 1;
    for (int t = start; t < k; t += stride) {
      Transition tr;
      tr.observation = traj.steps[t].observation;
      tr.attention = project_clamped(target.translation, traj.camera);
      tr.action = action;
      tr.reward = final ? 1.0 : 0.0;
      tr.next_observation = traj.steps[k].observation;
      tr.terminal = final;
      tr.demo = true;
      out.push_back(std::move(tr));
    }
    start = k;
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractError("replay capacity must be positive");
}

ReplayBuffer::ReplayBuffer(ReplayBuffer&& other) noexcept
    : capacity_(other.capacity_), demos_(std::move(other.demos_)), agent_(std::move(other.agent_)) {}

void ReplayBuffer::add(Transition t) {
  std::lock_guard lock(mutex_);
  if (t.demo) {
    if (demos_.size() + 1 > capacity_) throw ContractError("demo transitions exceed the replay capacity");
    demos_.push_back(std::move(t));
    while (demos_.size() + agent_.size() > capacity_) agent_.pop_front();
    return;
  }
  if (demos_.size() >= capacity_) return;
  agent_.push_back(std::move(t));
  while (demos_.size() + agent_.size() > capacity_) agent_.pop_front();
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return demos_.size() + agent_.size();
}

std::size_t ReplayBuffer::demo_count() const {
  std::lock_guard lock(mutex_);
  return demos_.size();
}

std::size_t ReplayBuffer::agent_count() const {
  std::lock_guard lock(mutex_);
  return agent_.size();
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::lock_guard lock(mutex_);
  const std::size_t total = demos_.size() + agent_.size();
  if (total == 0) throw ContractError("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = pick(rng);
    out.push_back(j < demos_.size() ? demos_[j] : agent_[j - demos_.size()]);
  }
  return out;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return sample(n, rng);
}

std::vector<Transition> ReplayBuffer::contents() const {
  std::lock_guard lock(mutex_);
  std::vector<Transition> out(demos_.begin(), demos_.end());
  out.insert(out.end(), agent_.begin(), agent_.end());
  return out;
}

}  // namespace arm::demo
