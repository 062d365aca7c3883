#include "arm/train/config.hpp"

#include "arm/errors.hpp"

namespace arm::train {

agents::QAttentionConfig RunConfig::effective_qattention() const {
  agents::QAttentionConfig q = qattention;
  if (!toggles.qreg) q.lambda_reg = 0.0;
  return q;
}

agents::NbpConfig RunConfig::effective_nbp() const {
  agents::NbpConfig n = nbp;
  n.confidence_critic = nbp.confidence_critic && toggles.confidence && toggles.qattention;
  n.pooled_actor = nbp.pooled_actor || !toggles.qattention;
  return n;
}

void RunConfig::validate() const {
  if (demo_count < 0 || env_steps < 0 || batch_size < 1 || replay_capacity < 1) {
    throw ContractError("run config counts must be non-negative and sizes positive");
  }
  if (train_ratio < 0 || checkpoint_interval < 1 || eval_interval < 1 || eval_episodes < 0 || augment_stride < 1) {
    throw ContractError("invalid run cadence settings");
  }
  if (crop < 1 || crop > env.image_size) throw ContractError("crop must fit inside the image");
  const int stride = qattention.encoder3 > 0 ? 8 : 4;
  if (toggles.qattention && env.image_size % stride != 0) {
    throw ContractError("image size must be divisible by " + std::to_string(stride));
  }
  nbp.sac.validate();
}

void apply_toggle(Toggles& t, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ContractError("toggle must look like NAME=on|off");
  const std::string name = assignment.substr(0, eq);
  const bool value = util::parse_bool(assignment.substr(eq + 1));
  if (name == "qattention") {
    t.qattention = value;
  } else if (name == "augmentation") {
    t.augmentation = value;
  } else if (name == "confidence") {
    t.confidence = value;
  } else if (name == "qreg") {
    t.qreg = value;
  } else {
    throw ContractError("unknown toggle '" + name + "'");
  }
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 over a combination of the three inputs
  std::uint64_t z = run_seed * 0x9E3779B97F4A7C15ull + stream * 0xBF58476D1CE4E5B9ull + index * 0x94D049BB133111EBull;
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {
const char* on_off(bool v) { return v ? "on" : "off"; }
}  // namespace

RunConfig RunConfig::from_config(const util::Config& cfg) {
  RunConfig r;
  r.env = sim::EnvConfig::from_config(cfg);
  r.seed = cfg.get<std::uint64_t>("seed", r.seed);
  r.demo_count = cfg.get<int>("demo_count", r.demo_count);
  r.env_steps = cfg.get<int>("env_steps", r.env_steps);
  r.train_ratio = cfg.get<double>("train_ratio", r.train_ratio);
  r.batch_size = cfg.get<int>("batch_size", r.batch_size);
  r.replay_capacity = cfg.get<int>("replay_capacity", r.replay_capacity);
  r.checkpoint_interval = cfg.get<int>("checkpoint_interval", r.checkpoint_interval);
  r.eval_interval = cfg.get<int>("eval_interval", r.eval_interval);
  r.eval_episodes = cfg.get<int>("eval_episodes", r.eval_episodes);
  r.augment_stride = cfg.get<int>("augment_stride", r.augment_stride);
  r.velocity_threshold = cfg.get<double>("velocity_threshold", r.velocity_threshold);
  r.lr = cfg.get<double>("lr", r.lr);
  r.crop = cfg.get<int>("crop", r.crop);
  for (const char* name : {"qattention", "augmentation", "confidence", "qreg"}) {
    if (auto v = cfg.get_optional<std::string>(std::string("toggle_") + name)) {
      apply_toggle(r.toggles, std::string(name) + "=" + *v);
    }
  }
  const std::string mode = cfg.get<std::string>("mode", "sync");
  if (mode != "sync" && mode != "async") throw ContractError("mode must be sync or async");
  r.mode = mode == "sync" ? Mode::kSync : Mode::kAsync;

  auto& q = r.qattention;
  q.stem_channels = cfg.get<int>("qa_stem_channels", q.stem_channels);
  q.encoder1 = cfg.get<int>("qa_encoder1", q.encoder1);
  q.encoder2 = cfg.get<int>("qa_encoder2", q.encoder2);
  q.encoder3 = cfg.get<int>("qa_encoder3", q.encoder3);
  q.gamma = cfg.get<double>("gamma", q.gamma);
  q.lambda_reg = cfg.get<double>("qa_lambda_reg", q.lambda_reg);
  q.reward_scale = cfg.get<double>("reward_scale", q.reward_scale);

  auto& n = r.nbp;
  n.stem_channels = cfg.get<int>("nbp_stem_channels", n.stem_channels);
  n.actor_channels = cfg.get<int>("actor_channels", n.actor_channels);
  n.dense_nodes = cfg.get<int>("dense_nodes", n.dense_nodes);
  n.critic_channels = cfg.get<int>("critic_channels", n.critic_channels);
  n.critic_blocks = cfg.get<int>("critic_blocks", n.critic_blocks);
  n.critic_head = cfg.get<int>("critic_head", n.critic_head);
  n.sac.gamma = q.gamma;
  n.sac.reward_scale = q.reward_scale;
  n.sac.alpha = cfg.get<double>("alpha", n.sac.alpha);
  n.sac.w_conf = cfg.get<double>("w_conf", n.sac.w_conf);
  n.sac.tau = cfg.get<double>("tau", n.sac.tau);
  r.validate();
  return r;
}

util::Config RunConfig::to_config() const {
  util::Config cfg;
  env.to_config(cfg);
  cfg.put("seed", seed);
  cfg.put("demo_count", demo_count);
  cfg.put("env_steps", env_steps);
  cfg.put("train_ratio", train_ratio);
  cfg.put("batch_size", batch_size);
  cfg.put("replay_capacity", replay_capacity);
  cfg.put("checkpoint_interval", checkpoint_interval);
  cfg.put("eval_interval", eval_interval);
  cfg.put("eval_episodes", eval_episodes);
  cfg.put("augment_stride", augment_stride);
  cfg.put("velocity_threshold", velocity_threshold);
  cfg.put("lr", lr);
  cfg.put("crop", crop);
  cfg.put("toggle_qattention", on_off(toggles.qattention));
  cfg.put("toggle_augmentation", on_off(toggles.augmentation));
  cfg.put("toggle_confidence", on_off(toggles.confidence));
  cfg.put("toggle_qreg", on_off(toggles.qreg));
  cfg.put("mode", mode == Mode::kSync ? "sync" : "async");
  cfg.put("qa_stem_channels", qattention.stem_channels);
  cfg.put("qa_encoder1", qattention.encoder1);
  cfg.put("qa_encoder2", qattention.encoder2);
  cfg.put("qa_encoder3", qattention.encoder3);
  cfg.put("gamma", qattention.gamma);
  cfg.put("qa_lambda_reg", qattention.lambda_reg);
  cfg.put("reward_scale", qattention.reward_scale);
  cfg.put("nbp_stem_channels", nbp.stem_channels);
  cfg.put("actor_channels", nbp.actor_channels);
  cfg.put("dense_nodes", nbp.dense_nodes);
  cfg.put("critic_channels", nbp.critic_channels);
  cfg.put("critic_blocks", nbp.critic_blocks);
  cfg.put("critic_head", nbp.critic_head);
  cfg.put("alpha", nbp.sac.alpha);
  cfg.put("w_conf", nbp.sac.w_conf);
  cfg.put("tau", nbp.sac.tau);
  return cfg;
}

}  // namespace arm::train
