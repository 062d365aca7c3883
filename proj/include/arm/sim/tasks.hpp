#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arm/sim/world.hpp"

namespace arm::sim {

enum class TaskId { kLiftBlock, kPutBlockInBin, kStackBlock };

const char* to_string(TaskId id);
/// Throws ContractError for unknown names.
TaskId parse_task(const std::string& name);
std::vector<TaskId> all_tasks();

struct TaskSpec {
  TaskId id = TaskId::kLiftBlock;
  std::function<std::vector<Object>(std::uint64_t seed, const Workspace&)> generate;
  std::function<bool(const WorldState&)> success;
  int max_steps = 10;
};

TaskSpec make_task(TaskId id, int max_steps = 10);

inline constexpr double kLiftHeight = 0.12;

}  // namespace arm::sim
