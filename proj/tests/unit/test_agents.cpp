#include <doctest.h>

#include <cmath>
#include <random>

#include "arm/agents/nbp.hpp"
#include "arm/agents/qattention.hpp"
#include "arm/errors.hpp"
#include "arm/nn/adam.hpp"
#include "arm/nn/ops.hpp"
#include "arm/sim/env.hpp"
#include "support/confidence.hpp"

using namespace arm;
using namespace arm::agents;
using nn::Tensor;

namespace {

ImageBatch random_batch(int n, int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ImageBatch b{Tensor({n, 3, size, size}), Tensor({n, 3, size, size}), Tensor({n, kProprioSize})};
  for (std::size_t i = 0; i < b.rgb.size(); ++i) b.rgb[i] = static_cast<Real>(0.5 + 0.5 * u(rng));
  for (std::size_t i = 0; i < b.cloud.size(); ++i) b.cloud[i] = static_cast<Real>(u(rng));
  for (std::size_t i = 0; i < b.proprio.size(); ++i) b.proprio[i] = static_cast<Real>(u(rng));
  return b;
}

// Zero weights and fixed biases make the last layer output the biases everywhere.
void rig_output(nn::ParamSet& p, const std::string& layer, const std::vector<Real>& bias) {
  Tensor& w = p.at(layer + ".w");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0;
  Tensor& b = p.at(layer + ".b");
  for (std::size_t i = 0; i < bias.size(); ++i) b[i] = bias[i];
}

Tensor raw_tensor(int n, const RawAction& raw) {
  Tensor t({n, kRawActionSize});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < kRawActionSize; ++j) t[static_cast<std::size_t>(i * kRawActionSize + j)] = static_cast<Real>(raw[j]);
  return t;
}

NbpBatch nbp_batch(int n, int size, std::uint64_t seed) {
  NbpBatch b;
  b.observation = random_batch(n, size, seed);
  b.next_observation = random_batch(n, size, seed + 1);
  b.raw_action = raw_tensor(n, RawAction{0.1, -0.2, 0.3, 0, 0, 0, 0.5, 0.9});
  b.rewards.assign(static_cast<std::size_t>(n), 0.0);
  b.terminal.assign(static_cast<std::size_t>(n), 0);
  return b;
}

}  // namespace

TEST_CASE("Q-attention output matches the input's spatial shape") {
  QAttentionConfig cfg;
  for (int encoder3 : {0, 16}) {
    cfg.encoder3 = encoder3;
    for (int size : {32, 64, 128}) {
      nn::Rng rng(1);
      const nn::ParamSet p = init_qattention(cfg, size, rng);
      const Tensor q = q_forward(p, cfg, random_batch(1, size, 2));
      CHECK(q.shape() == nn::Shape{1, 1, size, size});
      for (Real v : q.values()) CHECK(std::isfinite(v));
    }
  }
  cfg.encoder3 = 0;
  nn::Rng rng(1);
  const nn::ParamSet p = init_qattention(cfg, 32, rng);
  ImageBatch bad = random_batch(1, 32, 3);
  bad.cloud = Tensor({1, 3, 16, 16});
  CHECK_THROWS_AS(q_forward(p, cfg, bad), ShapeError);
}

TEST_CASE("freshly initialized Q-attention is near constant on constant input") {
  const QAttentionConfig cfg;
  nn::Rng rng(4);
  const nn::ParamSet p = init_qattention(cfg, 64, rng);
  ImageBatch b{Tensor({1, 3, 64, 64}, Real(0.4)), Tensor({1, 3, 64, 64}, Real(-0.2)), Tensor({1, kProprioSize})};
  const Tensor q = q_forward(p, cfg, b);
  Real lo = 1e9, hi = -1e9;
  for (int y = 16; y < 48; ++y)
    for (int x = 16; x < 48; ++x) {
      lo = std::min(lo, q.at(0, 0, y, x));
      hi = std::max(hi, q.at(0, 0, y, x));
    }
  CHECK(hi - lo < 1e-3);
}

TEST_CASE("argmax2d examples and tie-break") {
  Tensor q({1, 1, 10, 12});
  q.at(0, 0, 7, 5) = 1;
  CHECK(argmax2d(q)[0] == demo::Pixel{5, 7});
  CHECK(argmax2d(Tensor({1, 1, 6, 6}, Real(3)))[0] == demo::Pixel{0, 0});
  Tensor two({1, 1, 4, 4});
  two.at(0, 0, 2, 1) = 5;
  two.at(0, 0, 1, 3) = 5;
  CHECK(argmax2d(two)[0] == demo::Pixel{3, 1});
}

TEST_CASE("argmax2d matches an exhaustive scan and ignores constant shifts") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> levels(0, 6);
  for (int i = 0; i < 1000; ++i) {
    const int h = 1 + static_cast<int>(rng() % 20), w = 1 + static_cast<int>(rng() % 20);
    Tensor q({2, 1, h, w});
    const bool coarse = i % 2 == 0;  // coarse values produce ties
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = static_cast<Real>(coarse ? levels(rng) : u(rng));
    const auto got = argmax2d(q);
    for (int n = 0; n < 2; ++n) {
      int by = 0, bx = 0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (q.at(n, 0, y, x) > q.at(n, 0, by, bx)) by = y, bx = x;
      CHECK(got[static_cast<std::size_t>(n)] == demo::Pixel{bx, by});
    }
    Tensor shifted = q;
    const Real c = static_cast<Real>(coarse ? 3 : u(rng));
    for (std::size_t k = 0; k < q.size(); ++k) shifted[k] += c;
    CHECK(argmax2d(shifted) == got);
    CHECK(max2d(q)[0] == q.at(0, 0, got[0].y, got[0].x));
  }
}

TEST_CASE("crop windows are clamped and copied verbatim") {
  CHECK(crop_origin({0, 0}, 16, 128, 128) == demo::Pixel{0, 0});
  CHECK(crop_origin({127, 127}, 16, 128, 128) == demo::Pixel{112, 112});
  CHECK(crop_origin({40, 30}, 16, 128, 128) == demo::Pixel{32, 22});
  for (int x = -3; x < 70; ++x)
    for (int y : {-1, 0, 31, 63, 64}) {
      const demo::Pixel o = crop_origin({x, y}, 16, 64, 64);
      CHECK(o.x >= 0);
      CHECK(o.y >= 0);
      CHECK(o.x + 16 <= 64);
      CHECK(o.y + 16 <= 64);
    }

  sim::Observation obs;
  obs.width = 20;
  obs.height = 12;
  obs.rgb.resize(20 * 12 * 3);
  obs.cloud.resize(20 * 12 * 3);
  obs.valid.resize(20 * 12);
  std::mt19937_64 rng(2);
  for (auto& v : obs.rgb) v = static_cast<std::uint8_t>(rng());
  for (auto& v : obs.cloud) v = static_cast<float>(rng() % 1000) / 100.0f;
  for (auto& v : obs.valid) v = static_cast<std::uint8_t>(rng() % 2);
  for (int trial = 0; trial < 50; ++trial) {
    const demo::Pixel center{static_cast<int>(rng() % 20), static_cast<int>(rng() % 12)};
    const int c = 1 + static_cast<int>(rng() % 12);
    const CropPair cp = crop(obs, center, c);
    CHECK(cp.origin == crop_origin(center, c, 20, 12));
    for (int r = 0; r < c; ++r)
      for (int k = 0; k < c; ++k) {
        const std::size_t src = static_cast<std::size_t>(cp.origin.y + r) * 20 + cp.origin.x + k;
        const std::size_t dst = static_cast<std::size_t>(r) * c + k;
        for (int ch = 0; ch < 3; ++ch) {
          CHECK(cp.rgb[3 * dst + ch] == obs.rgb[3 * src + ch]);
          CHECK(cp.cloud[3 * dst + ch] == obs.cloud[3 * src + ch]);
        }
        CHECK(cp.valid[dst] == obs.valid[src]);
      }
  }
  CHECK_THROWS_AS(crop(obs, {0, 0}, 13), ContractError);

  const ImageBatch flat{Tensor({2, 3, 32, 32}, Real(0.25)), Tensor({2, 3, 32, 32}, Real(-1)), Tensor({2, kProprioSize})};
  const std::vector<demo::Pixel> centers{{0, 0}, {31, 5}};
  const ImageBatch cropped = crop_batch(flat, centers, 8);
  CHECK(cropped.rgb.shape() == nn::Shape{2, 3, 8, 8});
  for (Real v : cropped.rgb.values()) CHECK(v == Real(0.25));
  for (Real v : cropped.cloud.values()) CHECK(v == Real(-1));
  CHECK_THROWS_AS(crop_tensor(flat.rgb, centers, 33), ContractError);
}

TEST_CASE("observation features are normalized") {
  sim::Env env(sim::EnvConfig{});
  const sim::Observation obs = env.reset(1);
  const ImageBatch b = to_batch(obs, env.config().workspace);
  CHECK(b.rgb.shape() == nn::Shape{1, 3, 64, 64});
  for (Real v : b.rgb.values()) {
    CHECK(v >= 0);
    CHECK(v <= 1);
  }
  const std::size_t k = 20 * 64 + 30;
  REQUIRE(obs.valid[k]);
  const auto ws = env.config().workspace;
  for (int ch = 0; ch < 3; ++ch)
    CHECK(b.cloud.at(0, ch, 20, 30) ==
          doctest::Approx((obs.cloud[3 * k + ch] - ws.center()[ch]) / ws.half_extent()[ch]).epsilon(1e-5));
  CHECK(b.proprio[7] == 1);
  CHECK(b.proprio[6] == doctest::Approx(1.0));
}

TEST_CASE("Q-attention loss examples") {
  QAttentionConfig cfg;
  cfg.lambda_reg = 0;
  nn::Rng rng(3);
  nn::ParamSet online = init_qattention(cfg, 16, rng);
  nn::ParamSet target = online;
  rig_output(online, "qa.unet.10", {100});
  const ImageBatch obs = random_batch(1, 16, 5);
  {
    QAttentionBatch b{obs, {{3, 4}}, {1.0}, {1}, random_batch(1, 16, 6)};
    nn::Tape tape;
    CHECK(qattention_loss(nn::Bound(tape, online), target, cfg, b).value()[0] == doctest::Approx(0.0));
  }
  rig_output(online, "qa.unet.10", {0});
  rig_output(target, "qa.unet.10", {50});
  {
    QAttentionBatch b{obs, {{3, 4}}, {0.0}, {0}, random_batch(1, 16, 6)};
    nn::Tape tape;
    CHECK(qattention_loss(nn::Bound(tape, online), target, cfg, b).value()[0] == doctest::Approx(2450.25));
    QAttentionBatch outside{obs, {{16, 0}}, {0.0}, {0}, random_batch(1, 16, 6)};
    nn::Tape tape2;
    CHECK_THROWS_AS(qattention_loss(nn::Bound(tape2, online), target, cfg, outside), ContractError);
    QAttentionBatch missing{obs, {}, {0.0}, {0}, random_batch(1, 16, 6)};
    nn::Tape tape3;
    CHECK_THROWS_AS(qattention_loss(nn::Bound(tape3, online), target, cfg, missing), ContractError);
  }
}

TEST_CASE("Q regularisation shrinks Q magnitudes") {
  auto train = [](double lambda) {
    QAttentionConfig cfg;
    cfg.lambda_reg = lambda;
    cfg.stem_channels = 4;
    cfg.encoder1 = 8;
    cfg.encoder2 = 8;
    nn::Rng rng(11);
    nn::ParamSet p = init_qattention(cfg, 16, rng);
    nn::Adam opt(nn::AdamConfig{1e-3});
    const ImageBatch obs = random_batch(8, 16, 20);
    std::vector<demo::Pixel> px;
    std::vector<Real> y;
    for (int i = 0; i < 8; ++i) {
      px.push_back({i, 2 * i % 16});
      y.push_back(static_cast<Real>(10 * (i % 3)));
    }
    for (int s = 0; s < 2000; ++s) {
      const nn::ParamSet g = nn::gradients(
          [&](const nn::Bound& b) { return qattention_loss_with_targets(b, cfg, obs, px, y); }, p);
      opt.step(p, g);
    }
    const Tensor q = q_forward(p, cfg, random_batch(8, 16, 99));
    double m = 0;
    for (Real v : q.values()) m += std::abs(v);
    return m / static_cast<double>(q.size());
  };
  CHECK(train(1e-2) < train(0.0));
}

TEST_CASE("raw actions map into the workspace") {
  const sim::Workspace ws;
  const sim::PoseAction center = raw_to_pose({0, 0, 0, 0, 0, 0, 0.5, 0}, ws);
  CHECK((center.target.translation - ws.center()).norm() < 1e-12);
  CHECK(center.target.rotation.w() == doctest::Approx(1.0));
  CHECK(center.gripper == doctest::Approx(0.5));
  const sim::PoseAction edge = raw_to_pose({0.999999, 0, 0, 0, 0, 0, 1, 1}, ws);
  CHECK(edge.target.translation.x() == doctest::Approx(ws.hi.x()).epsilon(1e-5));
  CHECK(edge.gripper == doctest::Approx(1.0));
  CHECK_THROWS_AS(raw_to_pose({0, 0, 0, 0, 0, 0, 1e-7, 0}, ws), ResampleSignal);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.998, 0.998);
  for (int i = 0; i < 2000; ++i) {
    RawAction raw;
    for (double& v : raw) v = u(rng);
    const sim::PoseAction a = raw_to_pose(raw, ws);
    CHECK(ws.contains(a.target.translation));
    CHECK(a.target.rotation.w() >= 0);
    CHECK(std::abs(a.target.rotation.norm() - 1) < 1e-12);
    const RawAction back = pose_to_raw(a, ws);
    for (double v : back) CHECK(std::abs(v) < 1.0);
    const sim::PoseAction again = raw_to_pose(back, ws);
    CHECK((again.target.translation - a.target.translation).norm() < 1e-9);
    CHECK(geometry::angle_between(again.target.rotation, a.target.rotation) < 1e-6);
    CHECK((again.gripper >= 0.5) == (a.gripper >= 0.5));
  }
}

TEST_CASE("action sampling") {
  const std::vector<double> mean{0.3, -1.2, 0.0, 2.0, 0.1, -0.4, 0.7, 0.0};
  const std::vector<double> tight(8, -20.0), wide(8, -0.5);
  std::mt19937_64 rng(1);
  const ActionSample s = sample_action(mean, tight, rng);
  for (int j = 0; j < 8; ++j) CHECK(std::abs(s.raw[j] - std::tanh(mean[j])) < 1e-6);
  const ActionSample d = sample_action(mean, wide, rng, true);
  for (int j = 0; j < 8; ++j) CHECK(d.raw[j] == std::tanh(mean[j]));

  std::mt19937_64 r1(5), r2(5);
  const ActionSample a = sample_action(mean, wide, r1), b = sample_action(mean, wide, r2);
  CHECK(a.raw == b.raw);
  CHECK(a.log_prob == b.log_prob);
  for (double v : a.raw) CHECK(std::abs(v) < 1.0);
}

TEST_CASE("squashed log density integrates along a slice") {
  const std::vector<double> mean{0.3, -0.2, 0.5, 0.1, 0.0, -0.6, 0.2, 0.4};
  const std::vector<double> log_std{-0.3, 0.1, -1.0, 0.0, 0.2, -0.5, 0.3, -0.2};
  std::vector<double> pre{0.1, 0.2, 0.3, -0.4, 0.5, 0.0, -0.1, 0.2};
  // Density of every other component at its fixed point.
  double rest = 0.0;
  for (int j = 1; j < 8; ++j) {
    const double s = std::exp(log_std[j]);
    const double z = (pre[j] - mean[j]) / s;
    const double a = std::tanh(pre[j]);
    rest += -0.5 * z * z - std::log(s * std::sqrt(2 * M_PI)) - std::log(1 - a * a);
  }
  // Integrate over the squashed first component with the midpoint rule in a.
  const int n = 200000;
  double integral = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = -1.0 + (i + 0.5) * 2.0 / n;
    pre[0] = std::atanh(a);
    integral += std::exp(squashed_log_prob(mean, log_std, pre) - rest) * 2.0 / n;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("actor and critic output shapes and ranges") {
  NbpConfig cfg;
  for (int size : {8, 16}) {
    nn::Rng rng(2);
    nn::ParamSet p;
    init_actor(p, cfg, size, rng);
    init_critic(p, cfg, size, rng, "critic1");
    const ImageBatch in = random_batch(3, size, 7);
    nn::Tape tape;
    nn::Bound b(tape, p);
    const GaussianHead h = actor_forward(b, cfg, in);
    CHECK(h.mean.shape() == nn::Shape{3, 8});
    CHECK(h.log_std.shape() == nn::Shape{3, 8});
    for (Real v : h.log_std.value().values()) {
      CHECK(v >= kLogStdMin);
      CHECK(v <= kLogStdMax);
    }
    const CriticOutput o = critic_forward(b, cfg, "critic1", in, tape.constant(raw_tensor(3, RawAction{})));
    CHECK(o.q.shape() == nn::Shape{3, 1, size, size});
    CHECK(o.confidence_logit.shape() == nn::Shape{3, 1, size, size});
    const Tensor c = nn::sigmoid(o.confidence_logit).value();
    for (Real v : c.values()) {
      CHECK(v > 0);
      CHECK(v < 1);
    }
    const auto best = best_confidence_index(o);
    for (int n = 0; n < 3; ++n) {
      int arg = 0;
      for (int k = 1; k < size * size; ++k)
        if (c[static_cast<std::size_t>(n * size * size + k)] > c[static_cast<std::size_t>(n * size * size + arg)]) arg = k;
      CHECK(best[static_cast<std::size_t>(n)] == arg);
    }
  }
  NbpConfig single = cfg;
  single.confidence_critic = false;
  nn::Rng rng(2);
  nn::ParamSet p;
  init_critic(p, single, 16, rng, "critic1");
  nn::Tape tape;
  const CriticOutput o =
      critic_forward(nn::Bound(tape, p), single, "critic1", random_batch(2, 16, 1), tape.constant(raw_tensor(2, {})));
  CHECK(o.q.shape() == nn::Shape{2, 1});
  CHECK_FALSE(o.confidence_logit.valid());
  CHECK(best_confidence_index(o) == std::vector<int>{0, 0});
}

TEST_CASE("critic loss with zero TD error reduces to the confidence term") {
  NbpConfig cfg;
  nn::Rng rng(6);
  nn::ParamSet p;
  init_critic(p, cfg, 8, rng, "critic1");
  rig_output(p, "critic1.trunk.5", {100, 0.3f});
  NbpBatch b = nbp_batch(2, 8, 3);
  b.rewards = {1.0, 1.0};
  b.terminal = {1, 1};
  nn::Tape tape;
  const Real loss = critic_loss(nn::Bound(tape, p), "critic1", cfg, b, {100, 100}).value()[0];
  const double c = 1 / (1 + std::exp(-0.3));
  CHECK(loss == doctest::Approx(-cfg.sac.w_conf * std::log(c)).epsilon(1e-5));
}

TEST_CASE("critic targets use the clipped double-Q minimum") {
  NbpConfig cfg;
  nn::Rng rng(9);
  nn::ParamSet actor, t1, t2;
  init_actor(actor, cfg, 8, rng);
  init_critic(t1, cfg, 8, rng, "critic1");
  init_critic(t2, cfg, 8, rng, "critic2");
  rig_output(t1, "critic1.trunk.5", {30, 0});
  rig_output(t2, "critic2.trunk.5", {20, 0});
  NbpBatch b = nbp_batch(3, 8, 4);
  b.rewards = {0.0, 1.0, -1.0};
  b.terminal = {0, 1, 1};
  const Tensor eps({3, 8});
  const auto y = critic_targets(actor, t1, t2, cfg, b, eps);
  REQUIRE(y.size() == 3);
  CHECK(y[1] == doctest::Approx(100));
  CHECK(y[2] == doctest::Approx(-100));
  // Non-terminal: gamma * (min(30, 20) - alpha log pi) with zero noise.
  nn::Tape tape;
  const GaussianHead h = actor_forward(nn::Bound(tape, actor), cfg, b.next_observation);
  const SquashedSample s = squashed_sample(h, eps);
  const double expected = cfg.sac.gamma * (20.0 - cfg.sac.alpha * s.log_prob.value()[0]);
  CHECK(y[0] == doctest::Approx(expected).epsilon(1e-5));
  CHECK(y[0] <= cfg.sac.gamma * (20.0 - cfg.sac.alpha * s.log_prob.value()[0]) + 1e-3);
  b.next_observation = ImageBatch{};
  CHECK_THROWS_AS(critic_targets(actor, t1, t2, cfg, b, eps), ContractError);
}

TEST_CASE("actor loss against a constant critic") {
  NbpConfig cfg;
  cfg.sac.alpha = 0;
  nn::Rng rng(12);
  nn::ParamSet actor, critics;
  init_actor(actor, cfg, 8, rng);
  init_critic(critics, cfg, 8, rng, "critic1");
  init_critic(critics, cfg, 8, rng, "critic2");
  rig_output(critics, "critic1.trunk.5", {7, 0});
  rig_output(critics, "critic2.trunk.5", {9, 0});
  const ImageBatch obs = random_batch(4, 8, 1);
  std::mt19937_64 r(3);
  std::normal_distribution<double> nd;
  Tensor eps({4, 8});
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = static_cast<Real>(nd(r));
  nn::Tape tape;
  nn::ParamSet grads = actor.zeros_like();
  const nn::Var loss = actor_loss(nn::Bound(tape, actor, &grads), critics, cfg, obs, eps);
  CHECK(loss.value()[0] == doctest::Approx(-7.0));
  tape.backward(loss);
  for (const auto& [name, g] : grads)
    for (Real v : g.values()) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("large entropy temperature raises the policy's spread") {
  NbpConfig cfg;
  cfg.sac.alpha = 10.0;
  nn::Rng rng(13);
  nn::ParamSet actor, critics;
  init_actor(actor, cfg, 8, rng);
  init_critic(critics, cfg, 8, rng, "critic1");
  init_critic(critics, cfg, 8, rng, "critic2");
  // Start narrow; the squashed distribution's entropy peaks near unit spread.
  for (int j = kRawActionSize; j < 2 * kRawActionSize; ++j) actor.at("actor.trunk.6.b")[static_cast<std::size_t>(j)] = -3;
  const ImageBatch obs = random_batch(4, 8, 2);
  std::mt19937_64 r(4);
  std::normal_distribution<double> nd;
  Tensor eps({4, 8});
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = static_cast<Real>(nd(r));
  auto mean_log_std = [&] {
    nn::Tape tape;
    const Tensor ls = actor_forward(nn::Bound(tape, actor), cfg, obs).log_std.value();
    double m = 0;
    for (Real v : ls.values()) m += v;
    return m / static_cast<double>(ls.size());
  };
  nn::Adam opt(nn::AdamConfig{1e-3});
  double prev = mean_log_std();
  for (int s = 0; s < 20; ++s) {
    opt.step(actor, nn::gradients([&](const nn::Bound& b) { return actor_loss(b, critics, cfg, obs, eps); }, actor));
    const double now = mean_log_std();
    CHECK(now > prev);
    prev = now;
  }
}

TEST_CASE("SAC config validation") {
  SacConfig c;
  CHECK_NOTHROW(c.validate());
  c.gamma = 1.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = SacConfig{};
  c.tau = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = SacConfig{};
  c.reward_scale = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("confidence converges to the analytic optimum of the confidence-weighted loss") {
  const testing::ConfidenceFit quarter = testing::fit_confidence(2.0, 1.0, 400);
  CHECK(quarter.min == doctest::Approx(0.25).epsilon(0.05));
  CHECK(quarter.max == doctest::Approx(0.25).epsilon(0.05));
  const testing::ConfidenceFit saturated = testing::fit_confidence(1.0, 1.0, 400);
  CHECK(saturated.min >= 0.95 * (1 - 1e-3));
}
