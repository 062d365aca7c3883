#include "arm/train/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "arm/errors.hpp"

namespace arm::train {

namespace fs = std::filesystem;

std::vector<CurvePoint> aggregate_curves(const std::vector<std::vector<MetricsRow>>& runs) {
  if (runs.empty()) return {};
  std::set<long long> common;
  for (const auto& r : runs.front()) common.insert(r.env_step);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    std::set<long long> here;
    for (const auto& r : runs[i]) {
      if (common.count(r.env_step)) here.insert(r.env_step);
    }
    common = std::move(here);
  }
  std::vector<CurvePoint> out;
  for (long long step : common) {
    CurvePoint p;
    p.env_step = step;
    p.min = 1e300;
    p.max = -1e300;
    for (const auto& run : runs) {
      const auto it = std::find_if(run.begin(), run.end(), [&](const MetricsRow& r) { return r.env_step == step; });
      p.mean += it->eval_success_rate;
      p.min = std::min(p.min, it->eval_success_rate);
      p.max = std::max(p.max, it->eval_success_rate);
      ++p.runs;
    }
    p.mean /= p.runs;
    out.push_back(p);
  }
  return out;
}

std::vector<fs::path> write_report(const std::vector<fs::path>& inputs, const fs::path& out_dir) {
  std::set<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_regular_file(in) && in.filename() == "metrics.csv") {
      files.insert(fs::canonical(in));
    } else if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().filename() == "metrics.csv") files.insert(fs::canonical(e.path()));
      }
    } else {
      throw ContractError("report input " + in.string() + " is neither a run directory nor a metrics.csv");
    }
  }
  std::map<std::string, std::vector<std::vector<MetricsRow>>> by_task;
  for (const auto& f : files) {
    const fs::path config = f.parent_path() / "config.ini";
    if (!fs::exists(config)) continue;
    const std::string task = util::load_config(config).get<std::string>("task", "unknown");
    try {
      by_task[task].push_back(read_metrics(f));
    } catch (const FormatError&) {
      // Not an RL run (behavioural-cloning metrics use a different schema).
    }
  }
  if (by_task.empty()) throw ContractError("no run metrics found in the report inputs");
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& [task, runs] : by_task) {
    const fs::path path = out_dir / ("curve_" + task + ".csv");
    std::ofstream out(path, std::ios::trunc);
    out << kCurveHeader << '\n';
    for (const auto& p : aggregate_curves(runs)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%lld,%.4f,%.4f,%.4f,%d", p.env_step, p.mean, p.min, p.max, p.runs);
      out << buf << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace arm::train
