#pragma once

#include <string>
#include <vector>

#include "arm/train/config.hpp"

namespace arm::train {

struct AblationPreset {
  std::string name;
  RunConfig config;
};

/// The full method plus one preset per ablation axis: each component toggle
/// off, demo counts 25 and 50, and crops of 1/8 and 1/2 the image side.
std::vector<AblationPreset> ablation_suite(const RunConfig& base);

/// Throws ContractError for an unknown preset name.
RunConfig ablation_preset(const RunConfig& base, const std::string& name);

}  // namespace arm::train
