#pragma once

#include <array>
#include <random>
#include <string>

#include "arm/agents/qattention.hpp"
#include "arm/sim/env.hpp"

namespace arm::agents {

struct SacConfig {
  double gamma = 0.99;
  double alpha = 0.01;
  double w_conf = 0.1;
  double tau = 5e-4;
  double reward_scale = 100.0;

  void validate() const;
  friend bool operator==(const SacConfig&, const SacConfig&) = default;
};

struct NbpConfig {
  int stem_channels = 16;
  int actor_channels = 32;
  int dense_nodes = 64;
  int critic_channels = 32;
  int critic_blocks = 3;
  int critic_head = 64;
  /// Per-pixel Q with confidence; otherwise a single Q value per sample.
  bool confidence_critic = true;
  /// Global max pooling in the actor trunk (full-image baseline) instead of flattening.
  bool pooled_actor = false;
  SacConfig sac;

  friend bool operator==(const NbpConfig&, const NbpConfig&) = default;
};

inline constexpr Real kLogStdMin = -20;
inline constexpr Real kLogStdMax = 2;

using RawAction = std::array<double, kRawActionSize>;

nn::NetworkSpec actor_trunk_spec(const NbpConfig& cfg);
nn::NetworkSpec critic_trunk_spec(const NbpConfig& cfg);

/// Parameters under `prefix` for an input of size x size pixels.
void init_actor(ParamSet& params, const NbpConfig& cfg, int size, nn::Rng& rng, const std::string& prefix = "actor");
void init_critic(ParamSet& params, const NbpConfig& cfg, int size, nn::Rng& rng, const std::string& prefix);

struct GaussianHead {
  Var mean;     // N x 8
  Var log_std;  // N x 8, clamped
};

GaussianHead actor_forward(const Bound& p, const NbpConfig& cfg, const ImageBatch& input,
                           const std::string& prefix = "actor");

struct CriticOutput {
  Var q;                // N x 1 x h x w (1 x 1 for the single-Q critic)
  Var confidence_logit;  // invalid for the single-Q critic
};

/// Confidences are sigmoid(confidence_logit).
CriticOutput critic_forward(const Bound& p, const NbpConfig& cfg, const std::string& prefix, const ImageBatch& input,
                            const Var& raw_action);

struct SquashedSample {
  Var raw;       // N x 8, tanh(mean + std * eps)
  Var log_prob;  // N
};

/// Reparameterized tanh-Gaussian sample with fixed noise eps (N x 8).
SquashedSample squashed_sample(const GaussianHead& head, const Tensor& eps);

/// Per-sample log density, including the tanh correction, of pre-squash values u.
double squashed_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> pre_tanh);

struct ActionSample {
  RawAction raw{};
  double log_prob = 0.0;
};

/// Deterministic mode returns tanh(mean) and its log density at zero noise.
ActionSample sample_action(std::span<const double> mean, std::span<const double> log_std, std::mt19937_64& rng,
                           bool deterministic = false);

/// Throws ResampleSignal when the quaternion part has norm below 1e-6.
sim::PoseAction raw_to_pose(const RawAction& raw, const sim::Workspace& ws);
/// Inverse mapping used for demonstration actions; components are kept inside (-1, 1).
RawAction pose_to_raw(const sim::PoseAction& action, const sim::Workspace& ws);

/// Index of the highest-confidence pixel per sample (0 for the single-Q critic).
std::vector<int> best_confidence_index(const CriticOutput& out);

struct NbpBatch {
  ImageBatch observation;  // cropped, or full images for the baseline
  Tensor raw_action;       // N x 8
  std::vector<double> rewards;
  std::vector<char> terminal;
  ImageBatch next_observation;
};

/// Shared scalar targets: scaled reward plus, for non-terminal samples, the
/// discounted minimum over the target critics at their highest-confidence
/// pixels minus alpha times the next action's log probability.
std::vector<Real> critic_targets(const ParamSet& actor, const ParamSet& target1, const ParamSet& target2,
                                 const NbpConfig& cfg, const NbpBatch& batch, const Tensor& next_eps);

/// Mean over samples and pixels of (y - q)^2 c - w_conf log c; plain mean squared
/// error for the single-Q critic.
Var critic_loss(const Bound& critic, const std::string& prefix, const NbpConfig& cfg, const NbpBatch& batch,
                const std::vector<Real>& targets);

/// Mean of alpha log pi(a|s) - min_i Q_i(s, a) with each Q read at its
/// critic's highest-confidence pixel. Critics enter as constants.
Var actor_loss(const Bound& actor, const ParamSet& critics, const NbpConfig& cfg, const ImageBatch& observation,
               const Tensor& eps);

}  // namespace arm::agents
