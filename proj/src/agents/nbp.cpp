#include "arm/agents/nbp.hpp"

#include <cmath>
#include <numbers>

#include "arm/errors.hpp"
#include "arm/nn/ops.hpp"

namespace arm::agents {

using nn::Activation;
using nn::NetworkSpec;

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

Var tiled(nn::Tape& tape, const Tensor& v, int h, int w) { return nn::tile_spatial(tape.constant_ref(v), h, w); }

Var critic_input(const Bound& p, const NbpConfig& cfg, const std::string& prefix, const ImageBatch& in,
                 const Var& action) {
  nn::Tape& tape = p.tape();
  const int h = in.rgb.dim(2), w = in.rgb.dim(3);
  const Var fused =
      fuse_streams(p, prefix, tape.constant_ref(in.rgb), tape.constant_ref(in.cloud), cfg.stem_channels);
  return nn::concat_channels({fused, tiled(tape, in.proprio, h, w), nn::tile_spatial(action, h, w)});
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma >= 0 && gamma < 1)) throw ContractError("gamma must lie in [0, 1)");
  if (!(tau > 0 && tau <= 1)) throw ContractError("tau must lie in (0, 1]");
  if (!(reward_scale > 0)) throw ContractError("reward scale must be positive");
}

NetworkSpec actor_trunk_spec(const NbpConfig& cfg) {
  NetworkSpec s;
  for (int i = 0; i < 3; ++i) s.conv(cfg.actor_channels, 3, 2);
  if (cfg.pooled_actor) {
    s.global_max_pool();
  } else {
    s.flatten();
  }
  s.dense(cfg.dense_nodes).dense(cfg.dense_nodes).dense(2 * kRawActionSize, Activation::kNone);
  return s;
}

NetworkSpec critic_trunk_spec(const NbpConfig& cfg) {
  NetworkSpec s;
  if (cfg.confidence_critic) {
    s.conv(cfg.critic_channels, 3, 1);
    for (int i = 0; i < cfg.critic_blocks; ++i) s.residual(cfg.critic_channels, 3, 1);
    s.conv(cfg.critic_head, 1, 1).conv(2, 1, 1, false, Activation::kNone);
  } else {
    for (int i = 0; i < cfg.critic_blocks; ++i) s.residual(cfg.critic_channels, 3, 2);
    s.global_max_pool().dense(cfg.dense_nodes).dense(cfg.dense_nodes).dense(1, Activation::kNone);
  }
  return s;
}

void init_actor(ParamSet& params, const NbpConfig& cfg, int size, nn::Rng& rng, const std::string& prefix) {
  init_stems(params, prefix, cfg.stem_channels, size, rng);
  nn::init_params(actor_trunk_spec(cfg), {1, 2 * cfg.stem_channels + kProprioSize, size, size}, prefix + ".trunk",
                  params, rng);
}

void init_critic(ParamSet& params, const NbpConfig& cfg, int size, nn::Rng& rng, const std::string& prefix) {
  init_stems(params, prefix, cfg.stem_channels, size, rng);
  nn::init_params(critic_trunk_spec(cfg),
                  {1, 2 * cfg.stem_channels + kProprioSize + kRawActionSize, size, size}, prefix + ".trunk", params,
                  rng);
}

GaussianHead actor_forward(const Bound& p, const NbpConfig& cfg, const ImageBatch& in, const std::string& prefix) {
  nn::Tape& tape = p.tape();
  const int h = in.rgb.dim(2), w = in.rgb.dim(3);
  const Var fused =
      fuse_streams(p, prefix, tape.constant_ref(in.rgb), tape.constant_ref(in.cloud), cfg.stem_channels);
  const Var x = nn::concat_channels({fused, tiled(tape, in.proprio, h, w)});
  const Var out = nn::forward(actor_trunk_spec(cfg), p, prefix + ".trunk", x);
  GaussianHead head;
  head.mean = nn::slice_channels(out, 0, kRawActionSize);
  head.log_std = nn::clamp(nn::slice_channels(out, kRawActionSize, kRawActionSize), kLogStdMin, kLogStdMax);
  return head;
}

CriticOutput critic_forward(const Bound& p, const NbpConfig& cfg, const std::string& prefix, const ImageBatch& in,
                            const Var& raw_action) {
  const Var x = critic_input(p, cfg, prefix, in, raw_action);
  const Var out = nn::forward(critic_trunk_spec(cfg), p, prefix + ".trunk", x);
  CriticOutput r;
  if (cfg.confidence_critic) {
    r.q = nn::slice_channels(out, 0, 1);
    r.confidence_logit = nn::slice_channels(out, 1, 1);
  } else {
    r.q = out;  // N x 1
  }
  return r;
}

SquashedSample squashed_sample(const GaussianHead& head, const Tensor& eps) {
  nn::Tape& tape = head.mean.tape();
  if (eps.shape() != head.mean.shape()) throw ShapeError("noise shape must match the action mean");
  const Var e = tape.constant_ref(eps);
  const Var pre = head.mean + nn::exp(head.log_std) * e;
  SquashedSample s;
  s.raw = nn::tanh(pre);
  // log N(pre; mean, std) = -eps^2/2 - log_std - log(2 pi)/2; tanh correction
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)).
  Tensor half_eps2(eps.shape());
  for (std::size_t i = 0; i < eps.size(); ++i) half_eps2[i] = Real(-0.5) * eps[i] * eps[i] - Real(kHalfLog2Pi);
  const Var gauss = tape.constant(std::move(half_eps2)) - head.log_std;
  const Var correction = nn::add_scalar(nn::scale(pre, -2) - nn::scale(nn::softplus(nn::scale(pre, -2)), 2),
                                        static_cast<Real>(2 * std::numbers::ln2));
  s.log_prob = nn::sum_per_sample(gauss - correction);
  return s;
}

double squashed_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> pre_tanh) {
  double lp = 0.0;
  for (std::size_t j = 0; j < mean.size(); ++j) {
    const double u = pre_tanh[j];
    const double z = (u - mean[j]) / std::exp(log_std[j]);
    const double softplus = std::max(-2 * u, 0.0) + std::log1p(std::exp(-std::abs(2 * u)));
    lp += -0.5 * z * z - log_std[j] - kHalfLog2Pi - 2.0 * (std::numbers::ln2 - u - softplus);
  }
  return lp;
}

ActionSample sample_action(std::span<const double> mean, std::span<const double> log_std, std::mt19937_64& rng,
                           bool deterministic) {
  if (mean.size() != kRawActionSize || log_std.size() != kRawActionSize) throw ShapeError("action head must have 8 entries");
  std::normal_distribution<double> normal(0.0, 1.0);
  ActionSample s;
  std::array<double, kRawActionSize> pre{};
  for (int j = 0; j < kRawActionSize; ++j) {
    const double ls = std::clamp(log_std[j], double(kLogStdMin), double(kLogStdMax));
    pre[j] = deterministic ? mean[j] : mean[j] + std::exp(ls) * normal(rng);
    s.raw[j] = std::tanh(pre[j]);
  }
  s.log_prob = squashed_log_prob(mean, log_std, pre);
  return s;
}

sim::PoseAction raw_to_pose(const RawAction& raw, const sim::Workspace& ws) {
  sim::PoseAction a;
  const geometry::Vec3 c = ws.center(), h = ws.half_extent();
  for (int i = 0; i < 3; ++i) a.target.translation[i] = c[i] + raw[i] * h[i];
  const geometry::Quaternion q(raw[6], raw[3], raw[4], raw[5]);
  if (q.norm() < 1e-6) throw ResampleSignal("policy quaternion too close to zero");
  a.target.rotation = geometry::canonicalize(q);
  a.gripper = (raw[7] + 1.0) / 2.0;
  return a;
}

RawAction pose_to_raw(const sim::PoseAction& action, const sim::Workspace& ws) {
  constexpr double kLimit = 0.999;
  RawAction raw{};
  const geometry::Vec3 c = ws.center(), h = ws.half_extent();
  for (int i = 0; i < 3; ++i) raw[i] = std::clamp((action.target.translation[i] - c[i]) / h[i], -kLimit, kLimit);
  const geometry::Quaternion q = geometry::canonicalize(action.target.rotation);
  raw[3] = 0.5 * q.x();
  raw[4] = 0.5 * q.y();
  raw[5] = 0.5 * q.z();
  raw[6] = 0.5 * q.w();
  raw[7] = action.gripper >= 0.5 ? kLimit : -kLimit;
  return raw;
}

std::vector<int> best_confidence_index(const CriticOutput& out) {
  const int n = out.q.dim(0);
  if (!out.confidence_logit.valid()) return std::vector<int>(static_cast<std::size_t>(n), 0);
  const Tensor& c = out.confidence_logit.value();
  const int per = static_cast<int>(c.size()) / n;
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    const Real* v = c.data() + static_cast<std::size_t>(i) * per;
    int best = 0;
    for (int k = 1; k < per; ++k)
      if (v[k] > v[best]) best = k;
    idx.push_back(best);
  }
  return idx;
}

std::vector<Real> critic_targets(const ParamSet& actor, const ParamSet& target1, const ParamSet& target2,
                                 const NbpConfig& cfg, const NbpBatch& batch, const Tensor& next_eps) {
  const int n = batch.observation.size();
  if (batch.next_observation.size() != n) throw ContractError("batch is missing next observations");
  nn::Tape tape;
  Bound pa(tape, actor), p1(tape, target1), p2(tape, target2);
  const GaussianHead head = actor_forward(pa, cfg, batch.next_observation);
  const SquashedSample s = squashed_sample(head, next_eps);
  const CriticOutput o1 = critic_forward(p1, cfg, "critic1", batch.next_observation, s.raw);
  const CriticOutput o2 = critic_forward(p2, cfg, "critic2", batch.next_observation, s.raw);
  const Tensor v1 = nn::gather_per_sample(o1.q, best_confidence_index(o1)).value();
  const Tensor v2 = nn::gather_per_sample(o2.q, best_confidence_index(o2)).value();
  const Tensor& lp = s.log_prob.value();
  std::vector<Real> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double soft = std::min(v1[i], v2[i]) - cfg.sac.alpha * lp[i];
    y[i] = static_cast<Real>(cfg.sac.reward_scale * batch.rewards[i] +
                             (batch.terminal[i] ? 0.0 : cfg.sac.gamma * soft));
  }
  return y;
}

Var critic_loss(const Bound& critic, const std::string& prefix, const NbpConfig& cfg, const NbpBatch& batch,
                const std::vector<Real>& targets) {
  nn::Tape& tape = critic.tape();
  const int n = batch.observation.size();
  if (static_cast<int>(targets.size()) != n) throw ContractError("one critic target per sample required");
  const CriticOutput out =
      critic_forward(critic, cfg, prefix, batch.observation, tape.constant_ref(batch.raw_action));
  Tensor y_t({n});
  for (int i = 0; i < n; ++i) y_t[static_cast<std::size_t>(i)] = targets[static_cast<std::size_t>(i)];
  const Var y = nn::broadcast_samples(tape.constant(std::move(y_t)), out.q.shape());
  const Var err2 = nn::square(y - out.q);
  if (!cfg.confidence_critic) return nn::mean(err2);
  const Var conf = nn::sigmoid(out.confidence_logit);
  const Var log_conf = nn::log_sigmoid(out.confidence_logit);
  return nn::mean(err2 * conf) - nn::mean(log_conf) * static_cast<Real>(cfg.sac.w_conf);
}

Var actor_loss(const Bound& actor, const ParamSet& critics, const NbpConfig& cfg, const ImageBatch& observation,
               const Tensor& eps) {
  nn::Tape& tape = actor.tape();
  const GaussianHead head = actor_forward(actor, cfg, observation);
  const SquashedSample s = squashed_sample(head, eps);
  Bound pc(tape, critics);
  const CriticOutput o1 = critic_forward(pc, cfg, "critic1", observation, s.raw);
  const CriticOutput o2 = critic_forward(pc, cfg, "critic2", observation, s.raw);
  const Var q = nn::minimum(nn::gather_per_sample(o1.q, best_confidence_index(o1)),
                            nn::gather_per_sample(o2.q, best_confidence_index(o2)));
  return nn::mean(s.log_prob * static_cast<Real>(cfg.sac.alpha) - q);
}

}  // namespace arm::agents
