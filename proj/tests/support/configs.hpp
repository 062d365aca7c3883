#pragma once

#include "arm/train/config.hpp"

namespace arm::testing {

/// Small networks and images so end-to-end plumbing runs in seconds.
inline train::RunConfig tiny_run_config() {
  train::RunConfig c;
  c.env.image_size = 32;
  c.crop = 8;
  c.demo_count = 2;
  c.batch_size = 4;
  c.replay_capacity = 2000;
  c.eval_interval = 20;
  c.eval_episodes = 2;
  c.env_steps = 40;
  c.checkpoint_interval = 10;
  c.qattention.stem_channels = 4;
  c.qattention.encoder1 = 8;
  c.qattention.encoder2 = 8;
  c.nbp.stem_channels = 4;
  c.nbp.actor_channels = 8;
  c.nbp.dense_nodes = 16;
  c.nbp.critic_channels = 8;
  c.nbp.critic_blocks = 1;
  c.nbp.critic_head = 8;
  return c;
}

}  // namespace arm::testing
