#include "arm/train/bc.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "arm/errors.hpp"
#include "arm/nn/checkpoint.hpp"
#include "arm/nn/ops.hpp"

namespace arm::train {

using nn::Tensor;
using nn::Var;

RunConfig bc_agent_config(const RunConfig& cfg) {
  RunConfig out = cfg;
  out.toggles.qattention = false;
  return out;
}

Var bc_loss(const nn::Bound& actor, const agents::NbpConfig& cfg, const agents::ImageBatch& observation,
            const Tensor& targets, const std::vector<char>& close) {
  const int n = observation.size();
  if (targets.rank() != 2 || targets.dim(0) != n || targets.dim(1) != agents::kRawActionSize ||
      static_cast<int>(close.size()) != n) {
    throw ShapeError("bc_loss: targets must be N x 8 with one gripper label per sample");
  }
  nn::Tape& tape = actor.tape();
  const agents::GaussianHead head = agents::actor_forward(actor, cfg, observation);
  const Var pose = nn::tanh(nn::slice_channels(head.mean, 0, 7));
  Tensor pose_target({n, 7});
  Tensor sign({n, 1});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 7; ++j) pose_target[i * 7 + j] = targets[i * agents::kRawActionSize + j];
    sign[i] = close[i] ? 2 : -2;
  }
  const Var regression = nn::mean(nn::square(pose - tape.constant(std::move(pose_target))));
  // -log sigmoid(2m) for closing labels, -log sigmoid(-2m) otherwise.
  const Var logits = nn::slice_channels(head.mean, 7, 1) * tape.constant(std::move(sign));
  const Var bce = nn::mean(nn::log_sigmoid(logits)) * nn::Real(-1);
  return regression + bce;
}

BcResult bc_train(const RunConfig& cfg, const std::vector<demo::Trajectory>& demos, int epochs,
                  const std::filesystem::path& out_dir) {
  if (demos.empty()) throw ContractError("behavioural cloning needs at least one demo");
  if (epochs < 1) throw ContractError("behavioural cloning needs at least one epoch");
  const RunConfig agent_cfg = bc_agent_config(cfg);
  ArmAgent agent(agent_cfg, cfg.seed);
  const agents::NbpConfig nbp = agent_cfg.effective_nbp();
  const sim::Workspace& ws = cfg.env.workspace;

  std::vector<demo::Transition> data;
  for (const auto& traj : demos) {
    for (auto& t : demo_transitions(traj, agent_cfg)) data.push_back(std::move(t));
  }
  nn::Adam opt(nn::AdamConfig{cfg.lr});
  std::mt19937_64 rng(derive_seed(cfg.seed, kSampleStream, 0));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::ofstream csv;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    util::save_config(out_dir / "config.ini", cfg.to_config());
    csv.open(out_dir / "metrics.csv", std::ios::trunc);
    csv << "epoch,bc_loss\n";
  }

  BcResult result;
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const int n = static_cast<int>(end - start);
      std::vector<const sim::Observation*> obs;
      Tensor targets({n, agents::kRawActionSize});
      std::vector<char> close;
      for (std::size_t k = start; k < end; ++k) {
        const demo::Transition& t = data[order[k]];
        obs.push_back(t.observation.get());
        const agents::RawAction raw = agents::pose_to_raw(t.action, ws);
        const int i = static_cast<int>(k - start);
        for (int j = 0; j < agents::kRawActionSize; ++j)
          targets[i * agents::kRawActionSize + j] = static_cast<nn::Real>(raw[j]);
        close.push_back(t.action.gripper >= 0.5 ? 1 : 0);
      }
      const agents::ImageBatch images = agents::to_batch(obs, ws);
      nn::ParamSet grads = agent.actor().zeros_like();
      {
        nn::Tape tape;
        nn::Bound p(tape, agent.actor(), &grads);
        const Var loss = bc_loss(p, nbp, images, targets, close);
        total += static_cast<double>(loss.value()[0]) * n;
        tape.backward(loss);
      }
      opt.step(agent.actor(), grads);
    }
    result.epoch_losses.push_back(total / static_cast<double>(data.size()));
    if (csv.is_open()) {
      csv << epoch << ',' << result.epoch_losses.back() << '\n';
      csv.flush();
    }
  }
  AgentPolicy policy(agent);
  result.success_rate = evaluate(policy, cfg, cfg.eval_episodes, 0);
  if (!out_dir.empty()) {
    nn::save_checkpoint(out_dir / "bc.ckpt", agent.actor());
    std::ofstream(out_dir / "eval.txt") << "success_rate " << result.success_rate << '\n';
  }
  return result;
}

}  // namespace arm::train
