#pragma once

#include <filesystem>

#include "arm/train/runner.hpp"

namespace arm::train {

struct BcResult {
  std::vector<double> epoch_losses;
  double success_rate = 0.0;
};

/// Agent configuration used by the behavioural-cloning baseline: full-image
/// pooled actor, no Q-attention.
RunConfig bc_agent_config(const RunConfig& cfg);

/// Squared error on the first seven raw components (tanh of the mean) plus
/// binary cross-entropy on the gripper, where p(close) = sigmoid(2 m_7).
nn::Var bc_loss(const nn::Bound& actor, const agents::NbpConfig& cfg, const agents::ImageBatch& observation,
                const nn::Tensor& targets, const std::vector<char>& close);

/// Supervised training of the actor on keyframe actions from `demos`. Writes
/// bc.ckpt and metrics.csv (one row per epoch) under out_dir when it is non-empty.
BcResult bc_train(const RunConfig& cfg, const std::vector<demo::Trajectory>& demos, int epochs,
                  const std::filesystem::path& out_dir = {});

}  // namespace arm::train
