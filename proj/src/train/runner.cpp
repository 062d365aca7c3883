#include "arm/train/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "arm/demo/teacher.hpp"
#include "arm/errors.hpp"
#include "arm/nn/checkpoint.hpp"

namespace arm::train {

namespace fs = std::filesystem;
using demo::Transition;

std::vector<demo::Trajectory> generate_demos(const RunConfig& cfg) {
  std::vector<demo::Trajectory> out;
  out.reserve(static_cast<std::size_t>(cfg.demo_count));
  for (int i = 0; i < cfg.demo_count; ++i) out.push_back(demo::generate_demo(cfg.env, derive_seed(cfg.seed, kDemoStream, i)));
  return out;
}

std::vector<Transition> demo_transitions(const demo::Trajectory& traj, const RunConfig& cfg) {
  const demo::KeyframeSet kf = demo::discover_keyframes(traj, cfg.velocity_threshold);
  // A stride longer than the demo leaves one transition per keyframe.
  const int stride = cfg.toggles.augmentation ? cfg.augment_stride : traj.size() + 1;
  return demo::augment_demo(traj, kf, stride);
}

demo::ReplayBuffer prefill(const RunConfig& cfg, const std::vector<demo::Trajectory>& demos) {
  demo::ReplayBuffer buffer(static_cast<std::size_t>(cfg.replay_capacity));
  for (const auto& traj : demos) {
    for (auto& t : demo_transitions(traj, cfg)) buffer.add(std::move(t));
  }
  return buffer;
}

demo::ReplayBuffer prefill(const RunConfig& cfg) { return prefill(cfg, generate_demos(cfg)); }

Actor::Actor(const RunConfig& cfg, std::uint64_t episode_stream) : cfg_(cfg), env_(cfg.env), stream_(episode_stream) {}

Transition Actor::act_step(const Policy& policy, std::mt19937_64& rng) {
  if (!current_ || env_.terminal()) {
    current_ = std::make_shared<const sim::Observation>(env_.reset(derive_seed(cfg_.seed, stream_, episodes_)));
    ++episodes_;
  }
  const Decision d = policy.decide(*current_, false, rng);
  sim::StepResult r = env_.step(d.action);
  Transition t;
  t.observation = current_;
  t.attention = d.pixel;
  t.action = d.action;
  t.raw_action = d.raw;
  t.reward = r.reward;
  t.next_observation = std::make_shared<const sim::Observation>(std::move(r.observation));
  t.terminal = r.terminal;
  current_ = t.next_observation;
  return t;
}

double evaluate(const Policy& policy, const RunConfig& cfg, int episodes, std::uint64_t first_index) {
  if (episodes <= 0) return 0.0;
  int successes = 0;
  std::mt19937_64 rng(derive_seed(cfg.seed, kEvalStream, ~first_index));
  for (int i = 0; i < episodes; ++i) {
    sim::Env env(cfg.env);
    sim::Observation obs = env.reset(derive_seed(cfg.seed, kEvalStream, first_index + static_cast<std::uint64_t>(i)));
    while (!env.terminal()) {
      const Decision d = policy.decide(obs, true, rng);
      sim::StepResult r = env.step(d.action);
      if (r.terminal && r.reward > 0.0) ++successes;
      obs = std::move(r.observation);
    }
  }
  return static_cast<double>(successes) / episodes;
}

std::string format_metrics_row(const MetricsRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%lld,%lld,%.4f,%.9g,%.9g,%.9g", row.env_step, row.train_step, row.eval_success_rate,
                row.qa_loss, row.critic_loss, row.actor_loss);
  return buf;
}

std::vector<MetricsRow> read_metrics(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw FormatError("cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw FormatError("unexpected metrics header in " + csv.string());
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricsRow r;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf,%lf,%lf", &r.env_step, &r.train_step, &r.eval_success_rate,
                    &r.qa_loss, &r.critic_loss, &r.actor_loss) != 6) {
      throw FormatError("malformed metrics row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

CheckpointExchange::CheckpointExchange(fs::path path, int retries) : path_(std::move(path)), retries_(retries) {}

void CheckpointExchange::publish(const nn::ParamSet& params, long long version) {
  nn::ParamSet out = params;
  nn::Tensor v({1});
  v[0] = static_cast<nn::Real>(version);
  out.add(kVersionEntry, v);
  for (int attempt = 0;; ++attempt) {
    try {
      nn::save_checkpoint(path_, out);
      return;
    } catch (const std::exception&) {
      if (attempt >= retries_) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(1 << attempt));
    }
  }
}

std::optional<nn::ParamSet> CheckpointExchange::poll() {
  if (!fs::exists(path_)) return std::nullopt;
  for (int attempt = 0;; ++attempt) {
    try {
      nn::ParamSet p = nn::load_checkpoint(path_);
      const auto version = static_cast<long long>(p.at(kVersionEntry)[0]);
      if (version <= seen_) return std::nullopt;
      seen_ = version;
      return p;
    } catch (const std::exception&) {
      if (attempt >= retries_) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(1 << attempt));
    }
  }
}

namespace {

struct LossAccumulator {
  double qa = 0.0, critic = 0.0, actor = 0.0;
  long long count = 0;

  void add(const LossReport& r) {
    qa += r.qattention;
    critic += r.critic;
    actor += r.actor;
    ++count;
  }
  void fill(MetricsRow& row) {
    if (count > 0) {
      row.qa_loss = qa / count;
      row.critic_loss = critic / count;
      row.actor_loss = actor / count;
    }
    *this = {};
  }
};

class MetricsWriter {
 public:
  explicit MetricsWriter(const fs::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw FormatError("cannot write " + path.string());
    out_ << kMetricsHeader << '\n';
    out_.flush();
  }
  void append(const MetricsRow& row) {
    out_ << format_metrics_row(row) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

void dump_divergence(const fs::path& dir, ArmAgent& agent, const std::string& what) {
  std::ofstream out(dir / "divergence.txt");
  out << "error: " << what << "\ntrain_step: " << agent.train_steps() << '\n';
  auto report = [&](const char* name, const nn::ParamSet& p) {
    out << name << ": " << p.size() << " arrays, " << (p.all_finite() ? "finite" : "non-finite values present") << '\n';
  };
  report("qattention", agent.qattention());
  report("actor", agent.actor());
  report("critics", agent.critics());
  nn::ParamSet all = agent.qattention();
  all.merge(agent.actor());
  all.merge(agent.critics());
  try {
    nn::save_checkpoint(dir / "divergence.ckpt", all);
  } catch (const std::exception&) {
  }
}

LossReport train_once(ArmAgent& agent, const demo::ReplayBuffer& buffer, const RunConfig& cfg, std::mt19937_64& rng,
                      const fs::path& dir) {
  try {
    return agent.train(buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng), rng);
  } catch (const TrainingDivergence& e) {
    dump_divergence(dir, agent, e.what());
    throw;
  }
}

RunResult run_sync(const RunConfig& cfg, const fs::path& dir, const RunHooks& hooks) {
  ArmAgent agent(cfg, cfg.seed);
  demo::ReplayBuffer buffer = prefill(cfg);
  Actor actor(cfg, kTrainEpisodeStream);
  AgentPolicy policy(agent);
  CheckpointExchange exchange(dir / "checkpoints" / "latest.ckpt");
  MetricsWriter writer(dir / "metrics.csv");
  std::mt19937_64 policy_rng(derive_seed(cfg.seed, kPolicyStream, 0));
  std::mt19937_64 sample_rng(derive_seed(cfg.seed, kSampleStream, 0));
  RunResult result;
  LossAccumulator losses;
  double credit = 0.0;
  for (long long step = 1; step <= cfg.env_steps; ++step) {
    buffer.add(actor.act_step(policy, policy_rng));
    credit += cfg.train_ratio;
    while (credit >= 1.0) {
      credit -= 1.0;
      losses.add(train_once(agent, buffer, cfg, sample_rng, dir));
      if (agent.train_steps() % cfg.checkpoint_interval == 0) exchange.publish(agent.acting_params(), agent.train_steps());
    }
    result.env_steps = step;
    if (step % cfg.eval_interval == 0 || step == cfg.env_steps) {
      MetricsRow row;
      row.env_step = step;
      row.train_step = agent.train_steps();
      const auto round = static_cast<std::uint64_t>(step / cfg.eval_interval);
      row.eval_success_rate = evaluate(policy, cfg, cfg.eval_episodes, round * static_cast<std::uint64_t>(cfg.eval_episodes));
      losses.fill(row);
      writer.append(row);
      result.metrics.push_back(row);
      if (hooks.stop && hooks.stop(row)) break;
    }
  }
  result.train_steps = agent.train_steps();
  nn::save_checkpoint(dir / "final.ckpt", agent.acting_params());
  return result;
}

RunResult run_async(const RunConfig& cfg, const fs::path& dir, const RunHooks& hooks) {
  demo::ReplayBuffer buffer = prefill(cfg);
  CheckpointExchange learner_side(dir / "checkpoints" / "latest.ckpt");
  CheckpointExchange actor_side(dir / "checkpoints" / "latest.ckpt");
  MetricsWriter writer(dir / "metrics.csv");

  std::atomic<long long> env_steps{0};
  std::atomic<long long> train_steps{0};
  std::atomic<bool> done{false};
  std::mutex loss_mutex;
  LossAccumulator losses;
  std::exception_ptr learner_error;
  std::unique_ptr<ArmAgent> learner_agent;

  std::thread learner([&] {
    try {
      learner_agent = std::make_unique<ArmAgent>(cfg, cfg.seed);
      ArmAgent& agent = *learner_agent;
      std::mt19937_64 sample_rng(derive_seed(cfg.seed, kSampleStream, 0));
      while (!done.load()) {
        if (buffer.size() == 0 || agent.train_steps() >= static_cast<long long>(cfg.train_ratio * env_steps.load())) {
          std::this_thread::sleep_for(std::chrono::microseconds(200));
          continue;
        }
        const LossReport r = train_once(agent, buffer, cfg, sample_rng, dir);
        {
          std::lock_guard lock(loss_mutex);
          losses.add(r);
        }
        train_steps.store(agent.train_steps());
        if (agent.train_steps() % cfg.checkpoint_interval == 0) learner_side.publish(agent.acting_params(), agent.train_steps());
      }
    } catch (...) {
      learner_error = std::current_exception();
      done.store(true);
    }
  });

  RunResult result;
  try {
    ArmAgent acting(cfg, cfg.seed);
    AgentPolicy policy(acting);
    Actor actor(cfg, kTrainEpisodeStream);
    std::mt19937_64 policy_rng(derive_seed(cfg.seed, kPolicyStream, 0));
    for (long long step = 1; step <= cfg.env_steps && !done.load(); ++step) {
      if (auto p = actor_side.poll()) acting.load_acting_params(*p);
      buffer.add(actor.act_step(policy, policy_rng));
      env_steps.store(step);
      result.env_steps = step;
      if (step % cfg.eval_interval == 0 || step == cfg.env_steps) {
        MetricsRow row;
        row.env_step = step;
        row.train_step = train_steps.load();
        const auto round = static_cast<std::uint64_t>(step / cfg.eval_interval);
        row.eval_success_rate =
            evaluate(policy, cfg, cfg.eval_episodes, round * static_cast<std::uint64_t>(cfg.eval_episodes));
        {
          std::lock_guard lock(loss_mutex);
          losses.fill(row);
        }
        writer.append(row);
        result.metrics.push_back(row);
        if (hooks.stop && hooks.stop(row)) break;
      }
    }
  } catch (...) {
    done.store(true);
    learner.join();
    throw;
  }
  done.store(true);
  learner.join();
  if (learner_error) std::rethrow_exception(learner_error);
  result.train_steps = train_steps.load();
  nn::save_checkpoint(dir / "final.ckpt", learner_agent->acting_params());
  return result;
}

}  // namespace

RunResult run(const RunConfig& cfg, const fs::path& out_dir, const RunHooks& hooks) {
  cfg.validate();
  fs::create_directories(out_dir / "checkpoints");
  util::save_config(out_dir / "config.ini", cfg.to_config());
  RunResult result = cfg.mode == Mode::kSync ? run_sync(cfg, out_dir, hooks) : run_async(cfg, out_dir, hooks);
  if (!result.metrics.empty()) result.final_success = result.metrics.back().eval_success_rate;
  return result;
}

}  // namespace arm::train
