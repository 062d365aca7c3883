// Central finite-difference checks of the agent losses on toy networks.
// Built against the double-precision core; prints one line per loss and exits
// nonzero when any relative error reaches the tolerance.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "arm/agents/nbp.hpp"
#include "arm/agents/qattention.hpp"
#include "arm/nn/ops.hpp"

using namespace arm;
using namespace arm::agents;
using nn::ParamSet;
using nn::Tensor;

static_assert(sizeof(nn::Real) == sizeof(double), "gradient checks need the double-precision build");

namespace {

constexpr double kStep = 1e-4;
constexpr double kTolerance = 1e-3;
constexpr double kFloor = 1e-5;
constexpr int kSize = 4;

ImageBatch toy_batch(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ImageBatch b{Tensor({n, 3, kSize, kSize}), Tensor({n, 3, kSize, kSize}), Tensor({n, kProprioSize})};
  for (Tensor* t : {&b.rgb, &b.cloud, &b.proprio})
    for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = u(rng);
  return b;
}

struct Check {
  double max_rel = 0.0;
  std::size_t entries = 0;
};

Check check(const std::function<nn::Var(const nn::Bound&)>& loss, ParamSet params) {
  const ParamSet analytic = nn::gradients(loss, params);
  auto value = [&](const ParamSet& p) {
    nn::Tape tape;
    return loss(nn::Bound(tape, p)).value()[0];
  };
  Check c;
  for (auto& [name, t] : params) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double x = t[i];
      t[i] = x + kStep;
      const double up = value(params);
      t[i] = x - kStep;
      const double down = value(params);
      t[i] = x;
      const double numeric = (up - down) / (2 * kStep);
      const double a = analytic.at(name)[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kFloor});
      c.max_rel = std::max(c.max_rel, rel);
      ++c.entries;
    }
  }
  return c;
}

}  // namespace

int main() {
  QAttentionConfig qc;
  qc.stem_channels = 2;
  qc.encoder1 = 3;
  qc.encoder2 = 3;
  NbpConfig nc;
  nc.stem_channels = 2;
  nc.actor_channels = 3;
  nc.dense_nodes = 4;
  nc.critic_channels = 3;
  nc.critic_blocks = 1;
  nc.critic_head = 4;
  nc.sac.alpha = 0.1;
  nc.sac.w_conf = 0.5;
  nn::Rng rng(2024);

  const ParamSet qa = init_qattention(qc, kSize, rng);
  const ParamSet qa_target = init_qattention(qc, kSize, rng);
  QAttentionBatch qb{toy_batch(3, 1), {{0, 1}, {3, 3}, {2, 0}}, {0.0, 1.0, -1.0}, {0, 1, 1}, toy_batch(3, 2)};
  const Check q = check([&](const nn::Bound& p) { return qattention_loss(p, qa_target, qc, qb); }, qa);

  ParamSet actor, critics;
  init_actor(actor, nc, kSize, rng);
  init_critic(critics, nc, kSize, rng, "critic1");
  init_critic(critics, nc, kSize, rng, "critic2");
  NbpBatch nb;
  nb.observation = toy_batch(3, 3);
  nb.next_observation = toy_batch(3, 4);
  nb.raw_action = Tensor({3, kRawActionSize});
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < nb.raw_action.size(); ++i) nb.raw_action[i] = std::tanh(normal(rng));
  nb.rewards = {0.0, 1.0, 0.0};
  nb.terminal = {0, 1, 0};
  Tensor eps({3, kRawActionSize});
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = normal(rng);
  const std::vector<nn::Real> targets = critic_targets(actor, critics, critics, nc, nb, eps);
  const Check cr = check([&](const nn::Bound& p) { return critic_loss(p, "critic1", nc, nb, targets); },
                         critics.subset("critic1"));
  const Check ac = check([&](const nn::Bound& p) { return actor_loss(p, critics, nc, nb.observation, eps); }, actor);

  bool ok = true;
  for (const auto& [name, c] : {std::pair{"qattention_loss", q}, {"critic_loss", cr}, {"actor_loss", ac}}) {
    std::printf("%s max_rel_err=%.3e entries=%zu\n", name, c.max_rel, c.entries);
    ok = ok && c.max_rel < kTolerance;
  }
  return ok ? 0 : 1;
}
