#include "arm/sim/tasks.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "arm/errors.hpp"

namespace arm::sim {

const char* to_string(TaskId id) {
  switch (id) {
    case TaskId::kLiftBlock:
      return "lift_block";
    case TaskId::kPutBlockInBin:
      return "put_block_in_bin";
    case TaskId::kStackBlock:
      return "stack_block";
  }
  return "unknown";
}

TaskId parse_task(const std::string& name) {
  for (TaskId id : all_tasks()) {
    if (name == to_string(id)) return id;
  }
  throw ContractError("unknown task '" + name + "'");
}

std::vector<TaskId> all_tasks() { return {TaskId::kLiftBlock, TaskId::kPutBlockInBin, TaskId::kStackBlock}; }

namespace {

constexpr double kPlacementRange = 0.15;
constexpr double kClearance = 0.02;
constexpr int kMaxPlacementTries = 1000;

Object block(const std::string& name, Color color) {
  Object o;
  o.name = name;
  o.kind = ObjectKind::kBlock;
  o.size = Vec3::Constant(kBlockSize);
  o.color = color;
  return o;
}

Object bin() {
  Object o;
  o.name = "bin";
  o.kind = ObjectKind::kBin;
  o.size = Vec3(0.14, 0.14, 0.02);
  o.color = Color{60, 90, 200};
  o.graspable = false;
  return o;
}

double footprint_radius(const Object& o) { return 0.5 * std::hypot(o.size.x(), o.size.y()); }

// Places objects in order on the table without overlap.
std::vector<Object> place(std::vector<Object> objects, std::uint64_t seed, const Workspace& ws) {
  std::mt19937_64 rng(seed);
  const double range = std::min(kPlacementRange, std::min(ws.half_extent().x(), ws.half_extent().y()) - 0.05);
  std::uniform_real_distribution<double> pos(-range, range);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi / 4, std::numbers::pi / 4);
  const Vec3 c = ws.center();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    Object& o = objects[i];
    o.id = static_cast<int>(i);
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementTries && !placed; ++attempt) {
      const Vec3 p(c.x() + pos(rng), c.y() + pos(rng), ws.lo.z() + o.half().z());
      const double angle = yaw(rng);
      placed = true;
      for (std::size_t j = 0; j < i; ++j) {
        const Vec3 d = p - objects[j].pose.translation;
        if (std::hypot(d.x(), d.y()) < footprint_radius(o) + footprint_radius(objects[j]) + kClearance) {
          placed = false;
          break;
        }
      }
      if (placed) {
        o.pose.translation = p;
        o.pose.rotation = yaw_rotation(angle);
      }
    }
    if (!placed) throw PlacementError("could not place '" + o.name + "' without overlap");
  }
  return objects;
}

bool resting_on(const WorldState& s, const Object& top, const Object& base) {
  return base.over_footprint(top.pose.translation) &&
         std::abs(top.pose.translation.z() - (base.top() + top.half().z())) < 1e-6;
}

int index_of(const WorldState& s, const std::string& name) {
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (s.objects[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

TaskSpec make_task(TaskId id, int max_steps) {
  TaskSpec t;
  t.id = id;
  t.max_steps = max_steps;
  switch (id) {
    case TaskId::kLiftBlock:
      t.generate = [](std::uint64_t seed, const Workspace& ws) {
        return place({block("block", Color{220, 40, 40})}, seed, ws);
      };
      t.success = [](const WorldState& s) {
        const int b = index_of(s, "block");
        return b >= 0 && s.held == b && s.objects[b].pose.translation.z() >= kLiftHeight;
      };
      break;
    case TaskId::kPutBlockInBin:
      t.generate = [](std::uint64_t seed, const Workspace& ws) {
        return place({bin(), block("block", Color{220, 40, 40}), block("distractor", Color{40, 180, 60})}, seed, ws);
      };
      t.success = [](const WorldState& s) {
        const int b = index_of(s, "block");
        const int tray = index_of(s, "bin");
        return b >= 0 && tray >= 0 && s.held != b && resting_on(s, s.objects[b], s.objects[tray]);
      };
      break;
    case TaskId::kStackBlock:
      t.generate = [](std::uint64_t seed, const Workspace& ws) {
        return place({block("block_a", Color{220, 40, 40}), block("block_b", Color{40, 80, 220})}, seed, ws);
      };
      t.success = [](const WorldState& s) {
        const int a = index_of(s, "block_a");
        const int b = index_of(s, "block_b");
        return a >= 0 && b >= 0 && s.held != a && resting_on(s, s.objects[a], s.objects[b]);
      };
      break;
  }
  return t;
}

}  // namespace arm::sim
