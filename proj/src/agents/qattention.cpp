#include "arm/agents/qattention.hpp"

#include "arm/errors.hpp"
#include "arm/nn/ops.hpp"

namespace arm::agents {

using nn::Activation;
using nn::NetworkSpec;

NetworkSpec stem_spec(int channels) {
  NetworkSpec s;
  s.conv(channels, 3, 1);
  return s;
}

NetworkSpec unet_spec(const QAttentionConfig& cfg) {
  NetworkSpec s;
  s.skip_push().conv(cfg.encoder1, 3, 2).skip_push().conv(cfg.encoder2, 3, 2);
  if (cfg.encoder3 > 0) {
    s.skip_push().conv(cfg.encoder3, 3, 2).conv(cfg.encoder2, 3, 1).upsample().skip_concat();
  }
  s.conv(cfg.encoder1, 3, 1)
      .upsample()
      .skip_concat()
      .conv(cfg.stem_channels, 3, 1)
      .upsample()
      .skip_concat()
      .conv(1, 3, 1, false, Activation::kNone);
  return s;
}

Var fuse_streams(const Bound& p, const std::string& prefix, const Var& rgb, const Var& cloud, int stem_channels) {
  if (rgb.shape() != cloud.shape()) throw ShapeError("rgb and cloud inputs differ in shape");
  const NetworkSpec stem = stem_spec(stem_channels);
  return nn::concat_channels({nn::forward(stem, p, prefix + ".rgb", rgb), nn::forward(stem, p, prefix + ".pcd", cloud)});
}

void init_stems(ParamSet& params, const std::string& prefix, int stem_channels, int size, nn::Rng& rng) {
  const NetworkSpec stem = stem_spec(stem_channels);
  nn::init_params(stem, {1, 3, size, size}, prefix + ".rgb", params, rng);
  nn::init_params(stem, {1, 3, size, size}, prefix + ".pcd", params, rng);
}

ParamSet init_qattention(const QAttentionConfig& cfg, int image_size, nn::Rng& rng) {
  ParamSet params;
  init_stems(params, "qa", cfg.stem_channels, image_size, rng);
  nn::init_params(unet_spec(cfg), {1, 2 * cfg.stem_channels, image_size, image_size}, "qa.unet", params, rng);
  return params;
}

Var q_forward(const Bound& p, const QAttentionConfig& cfg, const Var& rgb, const Var& cloud) {
  const Var fused = fuse_streams(p, "qa", rgb, cloud, cfg.stem_channels);
  return nn::forward(unet_spec(cfg), p, "qa.unet", fused);
}

Tensor q_forward(const ParamSet& params, const QAttentionConfig& cfg, const ImageBatch& batch) {
  nn::Tape tape;
  Bound p(tape, params);
  return q_forward(p, cfg, tape.constant_ref(batch.rgb), tape.constant_ref(batch.cloud)).value();
}

demo::Pixel argmax2d(const Real* values, int height, int width) {
  int best = 0;
  const int n = height * width;
  for (int i = 1; i < n; ++i)
    if (values[i] > values[best]) best = i;
  return {best % width, best / width};
}

std::vector<demo::Pixel> argmax2d(const Tensor& qmaps) {
  const int n = qmaps.dim(0), h = qmaps.dim(2), w = qmaps.dim(3);
  std::vector<demo::Pixel> out;
  for (int i = 0; i < n; ++i) out.push_back(argmax2d(qmaps.data() + static_cast<std::size_t>(i) * h * w, h, w));
  return out;
}

std::vector<Real> max2d(const Tensor& qmaps) {
  const int n = qmaps.dim(0), w = qmaps.dim(3);
  const std::size_t per = qmaps.size() / static_cast<std::size_t>(n);
  std::vector<Real> out;
  for (int i = 0; i < n; ++i) {
    const Real* v = qmaps.data() + i * per;
    const demo::Pixel p = argmax2d(v, static_cast<int>(per) / w, w);
    out.push_back(v[static_cast<std::size_t>(p.y) * w + p.x]);
  }
  return out;
}

Var qattention_loss_with_targets(const Bound& online, const QAttentionConfig& cfg, const ImageBatch& observation,
                                 const std::vector<demo::Pixel>& pixels, const std::vector<Real>& targets) {
  nn::Tape& tape = online.tape();
  const int n = observation.size();
  if (static_cast<int>(pixels.size()) != n || static_cast<int>(targets.size()) != n) {
    throw ContractError("Q-attention batch needs one attention pixel and target per transition");
  }
  const Var q = q_forward(online, cfg, tape.constant_ref(observation.rgb), tape.constant_ref(observation.cloud));
  const int w = q.dim(3), h = q.dim(2);
  std::vector<int> index;
  for (const auto& px : pixels) {
    if (px.x < 0 || px.y < 0 || px.x >= w || px.y >= h) throw ContractError("attention pixel outside the image");
    index.push_back(px.y * w + px.x);
  }
  const Var picked = nn::gather_per_sample(q, index);
  Tensor y({n});
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = targets[static_cast<std::size_t>(i)];
  Var loss = nn::mean(nn::square(tape.constant(std::move(y)) - picked));
  if (cfg.lambda_reg > 0) loss = loss + nn::mean(nn::square(q)) * static_cast<Real>(cfg.lambda_reg);
  return loss;
}

Var qattention_loss(const Bound& online, const ParamSet& target, const QAttentionConfig& cfg,
                    const QAttentionBatch& batch) {
  const int n = batch.observation.size();
  if (static_cast<int>(batch.rewards.size()) != n || static_cast<int>(batch.terminal.size()) != n) {
    throw ContractError("Q-attention batch fields differ in length");
  }
  const std::vector<Real> next_max = max2d(q_forward(target, cfg, batch.next_observation));
  std::vector<Real> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double bootstrap = batch.terminal[i] ? 0.0 : cfg.gamma * next_max[i];
    y[i] = static_cast<Real>(cfg.reward_scale * batch.rewards[i] + bootstrap);
  }
  return qattention_loss_with_targets(online, cfg, batch.observation, batch.pixels, y);
}

}  // namespace arm::agents
