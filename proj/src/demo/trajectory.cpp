#include "arm/demo/trajectory.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "arm/errors.hpp"

namespace arm::demo {

static_assert(std::endian::native == std::endian::little, "trajectory files assume a little-endian host");

void Trajectory::append(const sim::WorldState& state, sim::Observation obs, const sim::PoseAction& action) {
  TrajectoryStep step;
  step.state = state;
  step.action = action;
  if (!steps.empty()) step.velocity = (obs.proprio.ee.translation - ee_pose(size() - 1).translation).norm();
  step.observation = std::make_shared<const sim::Observation>(std::move(obs));
  steps.push_back(std::move(step));
}

namespace {

constexpr char kMagic[8] = {'A', 'R', 'M', 'T', 'R', 'A', 'J', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

class Writer {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes.append(buf, sizeof(T));
  }
  template <class T>
  void put_array(const T* p, std::size_t n) {
    bytes.append(reinterpret_cast<const char*>(p), n * sizeof(T));
  }
  void put_pose(const geometry::Pose& p) {
    for (int i = 0; i < 3; ++i) put(p.translation[i]);
    for (int i = 0; i < 4; ++i) put(p.rotation.coeffs()[i]);
  }
  std::string bytes;
};

class Reader {
 public:
  Reader(const std::string& b, std::size_t end) : bytes_(b), end_(end) {}
  template <class T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  template <class T>
  void get_array(T* p, std::size_t n) {
    std::memcpy(p, take(n * sizeof(T)), n * sizeof(T));
  }
  geometry::Pose get_pose() {
    geometry::Pose p;
    for (int i = 0; i < 3; ++i) p.translation[i] = get<double>();
    for (int i = 0; i < 4; ++i) p.rotation.coeffs()[i] = get<double>();
    return p;
  }
  const char* take(std::size_t n) {
    if (end_ - pos_ < n) throw FormatError("trajectory file truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  Writer w;
  w.bytes.assign(kMagic, sizeof(kMagic));
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(traj.task));
  w.put(traj.seed);
  w.put(static_cast<std::uint8_t>(traj.success));
  w.put(static_cast<std::uint32_t>(traj.camera.width));
  w.put(static_cast<std::uint32_t>(traj.camera.height));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) w.put(traj.camera.intrinsics(r, c));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) w.put(traj.camera.extrinsics(r, c));
  w.put(static_cast<std::uint32_t>(traj.steps.size()));
  const std::size_t pixels = static_cast<std::size_t>(traj.camera.width) * traj.camera.height;
  for (const auto& s : traj.steps) {
    const sim::Observation& o = *s.observation;
    if (o.rgb.size() != 3 * pixels) throw ShapeError("observation size does not match the trajectory camera");
    w.put_array(o.rgb.data(), o.rgb.size());
    w.put_array(o.cloud.data(), o.cloud.size());
    w.put_array(o.valid.data(), o.valid.size());
    w.put_pose(o.proprio.ee);
    w.put(static_cast<std::uint8_t>(o.proprio.gripper_open > 0.5));
    w.put_pose(s.action.target);
    w.put(s.action.gripper);
    w.put(s.velocity);
  }
  w.put(fnv1a(w.bytes.data(), w.bytes.size()));
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() < sizeof(kMagic) + 8) throw FormatError("trajectory file truncated");
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, 8);
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError("not a trajectory file");
  if (stored != fnv1a(bytes.data(), body)) throw FormatError("trajectory checksum mismatch");

  Reader r(bytes, body);
  r.take(sizeof(kMagic));
  if (r.get<std::uint32_t>() != kVersion) throw FormatError("unsupported trajectory version");
  Trajectory traj;
  traj.task = static_cast<sim::TaskId>(r.get<std::uint32_t>());
  traj.seed = r.get<std::uint64_t>();
  traj.success = r.get<std::uint8_t>() != 0;
  traj.camera.width = static_cast<int>(r.get<std::uint32_t>());
  traj.camera.height = static_cast<int>(r.get<std::uint32_t>());
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) traj.camera.intrinsics(i, c) = r.get<double>();
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 4; ++c) traj.camera.extrinsics(i, c) = r.get<double>();
  const auto frames = r.get<std::uint32_t>();
  const std::size_t pixels = static_cast<std::size_t>(traj.camera.width) * traj.camera.height;
  for (std::uint32_t f = 0; f < frames; ++f) {
    sim::Observation o;
    o.width = traj.camera.width;
    o.height = traj.camera.height;
    o.rgb.resize(3 * pixels);
    o.cloud.resize(3 * pixels);
    o.valid.resize(pixels);
    r.get_array(o.rgb.data(), o.rgb.size());
    r.get_array(o.cloud.data(), o.cloud.size());
    r.get_array(o.valid.data(), o.valid.size());
    o.proprio.ee = r.get_pose();
    o.proprio.gripper_open = r.get<std::uint8_t>() ? 1.0 : 0.0;
    TrajectoryStep s;
    s.action.target = r.get_pose();
    s.action.gripper = r.get<double>();
    s.velocity = r.get<double>();
    s.observation = std::make_shared<const sim::Observation>(std::move(o));
    traj.steps.push_back(std::move(s));
  }
  if (!r.done()) throw FormatError("trailing bytes in trajectory file");
  return traj;
}

}  // namespace arm::demo
