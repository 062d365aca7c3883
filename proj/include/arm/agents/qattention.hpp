#pragma once

#include <vector>

#include "arm/agents/features.hpp"
#include "arm/nn/network.hpp"

namespace arm::agents {

using nn::Bound;
using nn::ParamSet;
using nn::Var;

struct QAttentionConfig {
  int stem_channels = 16;
  int encoder1 = 32;
  int encoder2 = 64;
  /// Width of an optional third stride-2 encoder stage; 0 disables it.
  int encoder3 = 0;
  double gamma = 0.99;
  double lambda_reg = 1e-2;
  double reward_scale = 100.0;

  friend bool operator==(const QAttentionConfig&, const QAttentionConfig&) = default;
};

/// Per-stream Conv(c, 3, 1) stem with layer norm and LeakyReLU.
nn::NetworkSpec stem_spec(int channels);

/// Encoder-decoder over the fused stems: two (or three) stride-2 stages,
/// mirrored decoder with up-sampling and skip concatenation, one-channel linear head.
nn::NetworkSpec unet_spec(const QAttentionConfig& cfg);

/// Runs the RGB and cloud stems under `prefix` and concatenates their features.
Var fuse_streams(const Bound& p, const std::string& prefix, const Var& rgb, const Var& cloud, int stem_channels);
void init_stems(ParamSet& params, const std::string& prefix, int stem_channels, int size, nn::Rng& rng);

ParamSet init_qattention(const QAttentionConfig& cfg, int image_size, nn::Rng& rng);

/// N x 1 x H x W per-pixel values.
Var q_forward(const Bound& p, const QAttentionConfig& cfg, const Var& rgb, const Var& cloud);
Tensor q_forward(const ParamSet& params, const QAttentionConfig& cfg, const ImageBatch& batch);

/// Coordinates of a maximal element; ties go to the smallest row-major index.
demo::Pixel argmax2d(const Real* values, int height, int width);
/// One pixel per sample of an N x 1 x H x W map.
std::vector<demo::Pixel> argmax2d(const Tensor& qmaps);
/// Spatial maximum per sample.
std::vector<Real> max2d(const Tensor& qmaps);

struct QAttentionBatch {
  ImageBatch observation;
  std::vector<demo::Pixel> pixels;
  std::vector<double> rewards;  // unscaled
  std::vector<char> terminal;
  ImageBatch next_observation;
};

/// Squared TD error at the stored pixels against the target network's spatial
/// maximum on the next observation, plus lambda_reg times the mean squared Q.
Var qattention_loss(const Bound& online, const ParamSet& target, const QAttentionConfig& cfg,
                    const QAttentionBatch& batch);

/// The same loss with target values supplied directly (one per sample).
Var qattention_loss_with_targets(const Bound& online, const QAttentionConfig& cfg, const ImageBatch& observation,
                                 const std::vector<demo::Pixel>& pixels, const std::vector<Real>& targets);

}  // namespace arm::agents
