#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "arm/demo/replay.hpp"
#include "arm/train/agent.hpp"

namespace arm::train {

/// Anything that maps an observation to an attention pixel and a pose action.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const sim::Observation& observation, bool greedy, std::mt19937_64& rng) const = 0;
};

class AgentPolicy : public Policy {
 public:
  explicit AgentPolicy(const ArmAgent& agent) : agent_(agent) {}
  Decision decide(const sim::Observation& observation, bool greedy, std::mt19937_64& rng) const override {
    return agent_.act(observation, greedy, rng);
  }

 private:
  const ArmAgent& agent_;
};

std::vector<demo::Trajectory> generate_demos(const RunConfig& cfg);
/// Keyframe discovery plus augmentation (or keyframe-only transitions) for one demo.
std::vector<demo::Transition> demo_transitions(const demo::Trajectory& traj, const RunConfig& cfg);
demo::ReplayBuffer prefill(const RunConfig& cfg);
demo::ReplayBuffer prefill(const RunConfig& cfg, const std::vector<demo::Trajectory>& demos);

/// Environment plus the episode bookkeeping of the acting loop.
class Actor {
 public:
  Actor(const RunConfig& cfg, std::uint64_t episode_stream);

  /// Attention, crop, pose, plan; resets first when no episode is active.
  demo::Transition act_step(const Policy& policy, std::mt19937_64& rng);

  sim::Env& env() { return env_; }
  long long episodes() const { return episodes_; }

 private:
  RunConfig cfg_;
  sim::Env env_;
  std::uint64_t stream_;
  std::shared_ptr<const sim::Observation> current_;
  long long episodes_ = 0;
};

/// Greedy success rate over `episodes` episodes seeded from (run seed, eval stream, first_index + i).
double evaluate(const Policy& policy, const RunConfig& cfg, int episodes, std::uint64_t first_index);

struct MetricsRow {
  long long env_step = 0;
  long long train_step = 0;
  double eval_success_rate = 0.0;
  double qa_loss = 0.0;  // means over the train steps since the previous row
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

inline constexpr const char* kMetricsHeader = "env_step,train_step,eval_success_rate,qa_loss,critic_loss,actor_loss";
std::string format_metrics_row(const MetricsRow& row);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& csv);

struct RunResult {
  std::vector<MetricsRow> metrics;
  double final_success = 0.0;
  long long env_steps = 0;
  long long train_steps = 0;
};

struct RunHooks {
  /// Called after each evaluation; returning true ends the run early.
  std::function<bool(const MetricsRow&)> stop;
};

/// Run directory layout: config.ini, metrics.csv, checkpoints/latest.ckpt, final.ckpt.
RunResult run(const RunConfig& cfg, const std::filesystem::path& out_dir, const RunHooks& hooks = {});

/// Retrying reader/writer for the actor/learner checkpoint exchange.
class CheckpointExchange {
 public:
  explicit CheckpointExchange(std::filesystem::path path, int retries = 5);

  /// Writes to a temporary sibling and renames it over the exchange file.
  void publish(const nn::ParamSet& params, long long version);
  /// The newest parameters if their version is newer than the last one returned.
  std::optional<nn::ParamSet> poll();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int retries_;
  long long seen_ = -1;
};

inline constexpr const char* kVersionEntry = "meta.version";

}  // namespace arm::train
