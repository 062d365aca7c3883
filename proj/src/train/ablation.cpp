#include "arm/train/ablation.hpp"

#include "arm/errors.hpp"

namespace arm::train {

std::vector<AblationPreset> ablation_suite(const RunConfig& base) {
  const int small = base.env.image_size / 8;
  const int large = base.env.image_size / 2;
  std::vector<std::string> names = {"full",      "no_qattention", "no_augmentation", "no_confidence", "no_qreg",
                                    "demos_25",  "demos_50",      "crop_" + std::to_string(small),
                                    "crop_" + std::to_string(large)};
  std::vector<AblationPreset> out;
  for (const auto& n : names) out.push_back({n, ablation_preset(base, n)});
  return out;
}

RunConfig ablation_preset(const RunConfig& base, const std::string& name) {
  RunConfig c = base;
  if (name == "full") return c;
  auto number = [&](std::size_t offset) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(name.substr(offset), &used);
      if (used == name.size() - offset) return v;
    } catch (const std::exception&) {
    }
    throw ContractError("malformed ablation preset '" + name + "'");
  };
  if (name == "no_qattention") {
    c.toggles.qattention = false;
  } else if (name == "no_augmentation") {
    c.toggles.augmentation = false;
  } else if (name == "no_confidence") {
    c.toggles.confidence = false;
  } else if (name == "no_qreg") {
    c.toggles.qreg = false;
  } else if (name.rfind("demos_", 0) == 0) {
    c.demo_count = number(6);
  } else if (name.rfind("crop_", 0) == 0) {
    c.crop = number(5);
  } else {
    throw ContractError("unknown ablation preset '" + name + "'");
  }
  c.validate();
  return c;
}

}  // namespace arm::train
