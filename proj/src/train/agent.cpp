#include "arm/train/agent.hpp"

#include "arm/errors.hpp"
#include "arm/nn/ops.hpp"

namespace arm::train {

using agents::ImageBatch;
using nn::ParamSet;
using nn::Tensor;

agents::RawAction transition_raw(const demo::Transition& t, const sim::Workspace& ws) {
  if (t.raw_action) return *t.raw_action;
  return agents::pose_to_raw(t.action, ws);
}

namespace {

Tensor normal_noise(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor eps({n, agents::kRawActionSize});
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = static_cast<nn::Real>(normal(rng));
  return eps;
}

double scalar(const nn::Var& v) { return static_cast<double>(v.value()[0]); }

constexpr int kMaxResamples = 16;

}  // namespace

ArmAgent::ArmAgent(const RunConfig& config, std::uint64_t seed)
    : config_(config),
      qa_cfg_(config.effective_qattention()),
      nbp_cfg_(config.effective_nbp()),
      qa_opt_(nn::AdamConfig{config.lr}),
      actor_opt_(nn::AdamConfig{config.lr}),
      critic_opt_(nn::AdamConfig{config.lr}) {
  config_.validate();
  nn::Rng rng(derive_seed(seed, kInitStream, 0));
  if (config_.toggles.qattention) qa_ = agents::init_qattention(qa_cfg_, config_.env.image_size, rng);
  const int size = config_.agent_input_size();
  agents::init_actor(actor_, nbp_cfg_, size, rng);
  agents::init_critic(critics_, nbp_cfg_, size, rng, "critic1");
  agents::init_critic(critics_, nbp_cfg_, size, rng, "critic2");
  qa_target_ = qa_;
  critic_targets_ = critics_;
}

Tensor ArmAgent::qmap(const sim::Observation& observation) const {
  if (!config_.toggles.qattention) throw ContractError("Q-attention is disabled in this configuration");
  return agents::q_forward(qa_, qa_cfg_, agents::to_batch(observation, config_.env.workspace));
}

Decision ArmAgent::act(const sim::Observation& observation, bool greedy, std::mt19937_64& rng) const {
  const ImageBatch full = agents::to_batch(observation, config_.env.workspace);
  Decision d;
  ImageBatch input = full;
  if (config_.toggles.qattention) {
    d.pixel = agents::argmax2d(agents::q_forward(qa_, qa_cfg_, full))[0];
    const demo::Pixel px[] = {d.pixel};
    input = agents::crop_batch(full, px, config_.crop);
  } else {
    d.pixel = {observation.width / 2, observation.height / 2};
  }
  nn::Tape tape;
  nn::Bound p(tape, actor_);
  const agents::GaussianHead head = agents::actor_forward(p, nbp_cfg_, input);
  std::vector<double> mean(head.mean.value().values().begin(), head.mean.value().values().end());
  std::vector<double> log_std(head.log_std.value().values().begin(), head.log_std.value().values().end());
  for (int attempt = 0;; ++attempt) {
    const agents::ActionSample s = agents::sample_action(mean, log_std, rng, greedy);
    try {
      d.action = agents::raw_to_pose(s.raw, config_.env.workspace);
      d.raw = s.raw;
      d.log_prob = s.log_prob;
      return d;
    } catch (const ResampleSignal&) {
      if (greedy || attempt >= kMaxResamples) {
        // Fall back to the identity orientation with the sampled position and gripper.
        agents::RawAction raw = s.raw;
        raw[3] = raw[4] = raw[5] = 0.0;
        raw[6] = 0.5;
        d.action = agents::raw_to_pose(raw, config_.env.workspace);
        d.raw = raw;
        d.log_prob = s.log_prob;
        return d;
      }
    }
  }
}

LossReport ArmAgent::train(const std::vector<demo::Transition>& batch, std::mt19937_64& rng) {
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw ContractError("empty training batch");
  std::vector<const sim::Observation*> obs, next;
  for (const auto& t : batch) {
    if (!t.next_observation) throw ContractError("transition without a next observation");
    obs.push_back(t.observation.get());
    next.push_back(t.next_observation.get());
  }
  const sim::Workspace& ws = config_.env.workspace;
  const ImageBatch full = agents::to_batch(obs, ws);
  const ImageBatch full_next = agents::to_batch(next, ws);
  LossReport report;

  agents::NbpBatch nb;
  nb.raw_action = Tensor({n, agents::kRawActionSize});
  for (int i = 0; i < n; ++i) {
    const agents::RawAction raw = transition_raw(batch[i], ws);
    for (int j = 0; j < agents::kRawActionSize; ++j)
      nb.raw_action[static_cast<std::size_t>(i) * agents::kRawActionSize + j] = static_cast<nn::Real>(raw[j]);
    nb.rewards.push_back(batch[i].reward);
    nb.terminal.push_back(batch[i].terminal ? 1 : 0);
  }

  if (config_.toggles.qattention) {
    agents::QAttentionBatch qb{full, {}, nb.rewards, nb.terminal, full_next};
    for (const auto& t : batch) qb.pixels.push_back(t.attention);
    ParamSet grads = qa_.zeros_like();
    {
      nn::Tape tape;
      nn::Bound p(tape, qa_, &grads);
      const nn::Var loss = agents::qattention_loss(p, qa_target_, qa_cfg_, qb);
      report.qattention = scalar(loss);
      tape.backward(loss);
    }
    qa_opt_.step(qa_, grads);
    const std::vector<demo::Pixel> next_pixels = agents::argmax2d(agents::q_forward(qa_, qa_cfg_, full_next));
    nb.observation = agents::crop_batch(full, qb.pixels, config_.crop);
    nb.next_observation = agents::crop_batch(full_next, next_pixels, config_.crop);
  } else {
    nb.observation = full;
    nb.next_observation = full_next;
  }

  const std::vector<nn::Real> y =
      agents::critic_targets(actor_, critic_targets_, critic_targets_, nbp_cfg_, nb, normal_noise(n, rng));
  {
    ParamSet grads = critics_.zeros_like();
    nn::Tape tape;
    nn::Bound p(tape, critics_, &grads);
    const nn::Var l1 = agents::critic_loss(p, "critic1", nbp_cfg_, nb, y);
    const nn::Var l2 = agents::critic_loss(p, "critic2", nbp_cfg_, nb, y);
    report.critic = 0.5 * (scalar(l1) + scalar(l2));
    tape.backward(l1 + l2);
    critic_opt_.step(critics_, grads);
  }
  {
    ParamSet grads = actor_.zeros_like();
    nn::Tape tape;
    nn::Bound p(tape, actor_, &grads);
    const nn::Var loss = agents::actor_loss(p, critics_, nbp_cfg_, nb.observation, normal_noise(n, rng));
    report.actor = scalar(loss);
    tape.backward(loss);
    actor_opt_.step(actor_, grads);
  }
  if (!std::isfinite(report.qattention) || !std::isfinite(report.critic) || !std::isfinite(report.actor)) {
    throw TrainingDivergence("non-finite loss at train step " + std::to_string(train_steps_));
  }
  const double tau = nbp_cfg_.sac.tau;
  if (config_.toggles.qattention) nn::soft_update(qa_target_, qa_, tau);
  nn::soft_update(critic_targets_, critics_, tau);
  ++train_steps_;
  return report;
}

ParamSet ArmAgent::acting_params() const {
  ParamSet out = qa_;
  out.merge(actor_);
  return out;
}

void ArmAgent::load_acting_params(const ParamSet& params) {
  for (auto& [name, t] : qa_) t = params.at(name);
  for (auto& [name, t] : actor_) t = params.at(name);
}

}  // namespace arm::train
