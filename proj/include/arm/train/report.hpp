#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "arm/train/runner.hpp"

namespace arm::train {

struct CurvePoint {
  long long env_step = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int runs = 0;
};

/// Success rate statistics at every evaluation step present in all runs.
std::vector<CurvePoint> aggregate_curves(const std::vector<std::vector<MetricsRow>>& runs);

inline constexpr const char* kCurveHeader = "env_step,mean,min,max,runs";

/// Finds every metrics.csv under the inputs, groups the runs by the task in
/// their config.ini and writes curve_<task>.csv into out_dir. Returns the
/// written files.
std::vector<std::filesystem::path> write_report(const std::vector<std::filesystem::path>& inputs,
                                                const std::filesystem::path& out_dir);

}  // namespace arm::train
