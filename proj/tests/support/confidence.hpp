#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "arm/agents/nbp.hpp"
#include "arm/nn/adam.hpp"
#include "arm/nn/ops.hpp"

namespace arm::testing {

struct ConfidenceFit {
  double mean = 0.0;
  double min = 1.0;
  double max = 0.0;
};

/// Trains a small critic on a fixed batch whose Q channel is frozen at zero,
/// so every pixel sees the TD error `delta`, and returns the final confidences.
inline ConfidenceFit fit_confidence(double delta, double w_conf, int steps, std::uint64_t seed = 5) {
  using namespace arm::agents;
  NbpConfig cfg;
  cfg.stem_channels = 4;
  cfg.critic_channels = 8;
  cfg.critic_blocks = 1;
  cfg.critic_head = 8;
  cfg.sac.w_conf = w_conf;
  constexpr int kSize = 8;
  nn::Rng rng(seed);
  nn::ParamSet params;
  init_critic(params, cfg, kSize, rng, "critic1");
  const std::string head = "critic1.trunk." + std::to_string(cfg.critic_blocks + 2);
  nn::Tensor& w = params.at(head + ".w");
  const std::size_t q_row = w.size() / 2;
  for (std::size_t i = 0; i < q_row; ++i) w[i] = 0;
  params.at(head + ".b")[0] = 0;

  std::mt19937_64 data(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NbpBatch batch;
  batch.observation = ImageBatch{nn::Tensor({4, 3, kSize, kSize}), nn::Tensor({4, 3, kSize, kSize}),
                                 nn::Tensor({4, kProprioSize})};
  batch.raw_action = nn::Tensor({4, kRawActionSize});
  for (nn::Tensor* t : {&batch.observation.rgb, &batch.observation.cloud, &batch.observation.proprio, &batch.raw_action})
    for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = static_cast<nn::Real>(u(data));
  batch.rewards.assign(4, 0.0);
  batch.terminal.assign(4, 1);
  batch.next_observation = batch.observation;
  const std::vector<nn::Real> targets(4, static_cast<nn::Real>(delta));

  nn::Adam opt(nn::AdamConfig{1e-2});
  for (int s = 0; s < steps; ++s) {
    nn::ParamSet g = nn::gradients(
        [&](const nn::Bound& p) { return critic_loss(p, "critic1", cfg, batch, targets); }, params);
    nn::Tensor& gw = g.at(head + ".w");
    for (std::size_t i = 0; i < q_row; ++i) gw[i] = 0;
    g.at(head + ".b")[0] = 0;
    opt.step(params, g);
  }

  nn::Tape tape;
  const CriticOutput out = critic_forward(nn::Bound(tape, params), cfg, "critic1", batch.observation,
                                          tape.constant_ref(batch.raw_action));
  const nn::Tensor& logit = out.confidence_logit.value();
  ConfidenceFit fit;
  for (std::size_t i = 0; i < logit.size(); ++i) {
    const double c = 1.0 / (1.0 + std::exp(-static_cast<double>(logit[i])));
    fit.mean += c / static_cast<double>(logit.size());
    fit.min = std::min(fit.min, c);
    fit.max = std::max(fit.max, c);
  }
  return fit;
}

}  // namespace arm::testing
