#pragma once

#include <cstdint>
#include <string>

#include "arm/agents/nbp.hpp"
#include "arm/sim/env.hpp"
#include "arm/util/config.hpp"

namespace arm::train {

enum class Mode { kSync, kAsync };

/// The ablation axes. Each defaults to the full method.
struct Toggles {
  bool qattention = true;
  bool augmentation = true;
  bool confidence = true;
  bool qreg = true;
  friend bool operator==(const Toggles&, const Toggles&) = default;
};

struct RunConfig {
  sim::EnvConfig env;
  std::uint64_t seed = 0;
  int demo_count = 100;
  int env_steps = 10000;
  double train_ratio = 1.0;  // train steps per env step
  int batch_size = 16;
  int replay_capacity = 10000;
  int checkpoint_interval = 100;  // train steps
  int eval_interval = 1000;       // env steps
  int eval_episodes = 20;
  int augment_stride = 5;
  double velocity_threshold = 1e-3;
  double lr = 3e-3;
  int crop = 16;
  Toggles toggles;
  Mode mode = Mode::kSync;
  agents::QAttentionConfig qattention;
  agents::NbpConfig nbp;

  /// Q-attention and next-best-pose settings with the toggles applied.
  agents::QAttentionConfig effective_qattention() const;
  agents::NbpConfig effective_nbp() const;
  /// Side of the next-best-pose agent's input window.
  int agent_input_size() const { return toggles.qattention ? crop : env.image_size; }

  void validate() const;
  static RunConfig from_config(const util::Config& cfg);
  util::Config to_config() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Applies "name=on|off" to the toggle of that name. Throws ContractError for unknown names.
void apply_toggle(Toggles& toggles, const std::string& assignment);

/// Deterministic per-purpose seed streams derived from a run seed.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream, std::uint64_t index);

inline constexpr std::uint64_t kDemoStream = 1;
inline constexpr std::uint64_t kTrainEpisodeStream = 2;
inline constexpr std::uint64_t kEvalStream = 3;
inline constexpr std::uint64_t kInitStream = 4;
inline constexpr std::uint64_t kSampleStream = 5;
inline constexpr std::uint64_t kPolicyStream = 6;

}  // namespace arm::train
