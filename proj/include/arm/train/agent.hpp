#pragma once

#include <random>

#include "arm/demo/replay.hpp"
#include "arm/nn/adam.hpp"
#include "arm/train/config.hpp"

namespace arm::train {

struct Decision {
  demo::Pixel pixel;
  agents::RawAction raw{};
  sim::PoseAction action;
  double log_prob = 0.0;
};

struct LossReport {
  double qattention = 0.0;
  double critic = 0.0;  // mean of the two critics
  double actor = 0.0;
};

/// Q-attention, actor, twin critics, their targets and optimizers.
class ArmAgent {
 public:
  ArmAgent(const RunConfig& config, std::uint64_t seed);

  /// Attention -> crop -> pose. Greedy mode uses tanh(mean).
  Decision act(const sim::Observation& observation, bool greedy, std::mt19937_64& rng) const;

  /// One gradient step on every network followed by the target updates.
  LossReport train(const std::vector<demo::Transition>& batch, std::mt19937_64& rng);

  /// Per-pixel Q map (1 x 1 x H x W) of the online Q-attention network.
  nn::Tensor qmap(const sim::Observation& observation) const;

  /// Parameters needed for acting (Q-attention and actor).
  nn::ParamSet acting_params() const;
  void load_acting_params(const nn::ParamSet& params);

  nn::ParamSet& qattention() { return qa_; }
  nn::ParamSet& qattention_target() { return qa_target_; }
  nn::ParamSet& actor() { return actor_; }
  nn::ParamSet& critics() { return critics_; }
  nn::ParamSet& critic_targets() { return critic_targets_; }
  const RunConfig& config() const { return config_; }
  long long train_steps() const { return train_steps_; }

 private:
  RunConfig config_;
  agents::QAttentionConfig qa_cfg_;
  agents::NbpConfig nbp_cfg_;
  nn::ParamSet qa_, qa_target_, actor_, critics_, critic_targets_;
  nn::Adam qa_opt_, actor_opt_, critic_opt_;
  long long train_steps_ = 0;
};

/// Raw action stored with a transition, or the inverse mapping of its pose action.
agents::RawAction transition_raw(const demo::Transition& t, const sim::Workspace& ws);

}  // namespace arm::train
