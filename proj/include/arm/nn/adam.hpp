#pragma once

#include "arm/nn/params.hpp"

namespace arm::nn {

struct AdamConfig {
  double lr = 3e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Applies one update in place. Throws TrainingDivergence if any gradient is
  /// non-finite; params are left untouched in that case.
  void step(ParamSet& params, const ParamSet& grads);

  long long steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

  /// Moment buffers, exposed for checkpointing.
  ParamSet& first_moment() noexcept { return m_; }
  ParamSet& second_moment() noexcept { return v_; }
  void set_steps(long long t) noexcept { t_ = t; }

 private:
  AdamConfig config_;
  ParamSet m_;
  ParamSet v_;
  long long t_ = 0;
};

}  // namespace arm::nn
