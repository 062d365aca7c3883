#include "arm/sim/render.hpp"

#include <cmath>
#include <limits>

namespace arm::sim {

namespace {

struct Hit {
  double depth = std::numeric_limits<double>::infinity();
  Color color = kBackground;
};

// Slab test in the box frame; returns entry parameter and the entry face axis.
bool intersect_box(const Object& box, const Vec3& origin, const Vec3& dir, double& t_hit, int& axis) {
  const Quaternion inv = box.pose.rotation.conjugate();
  const Vec3 o = inv * (origin - box.pose.translation);
  const Vec3 d = inv * dir;
  const Vec3 h = box.half();
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  int enter_axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < -h[a] || o[a] > h[a]) return false;
      continue;
    }
    double ta = (-h[a] - o[a]) / d[a];
    double tb = (h[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) {
      t0 = ta;
      enter_axis = a;
    }
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t0 <= 0 || enter_axis < 0) return false;
  t_hit = t0;
  axis = enter_axis;
  return true;
}

Color shade(const Color& c, double f) {
  return {static_cast<std::uint8_t>(std::lround(c[0] * f)), static_cast<std::uint8_t>(std::lround(c[1] * f)),
          static_cast<std::uint8_t>(std::lround(c[2] * f))};
}

}  // namespace

geometry::CameraModel default_camera(int image_size) {
  return geometry::CameraModel::look_at(Vec3(0.0, -0.5, 0.5), Vec3(0.0, 0.0, 0.05), Vec3::UnitZ(), image_size,
                                        image_size, static_cast<double>(image_size));
}

std::vector<Object> gripper_geometry(const WorldState& state) {
  const double opening = state.gripper_open ? 2 * kGripperHalfWidth : 0.03;
  const Color color = state.gripper_open ? Color{230, 230, 230} : Color{120, 120, 130};
  std::vector<Object> parts;
  for (int side : {-1, 1}) {
    Object finger;
    finger.name = "finger";
    finger.size = Vec3(0.01, 0.02, 0.05);
    finger.color = color;
    finger.graspable = false;
    finger.pose = geometry::compose(state.ee, Pose{Vec3(side * (opening / 2 + 0.005), 0, 0.01), Quaternion::Identity()});
    parts.push_back(finger);
  }
  Object palm;
  palm.name = "palm";
  palm.size = Vec3(opening + 0.02, 0.02, 0.012);
  palm.color = color;
  palm.graspable = false;
  palm.pose = geometry::compose(state.ee, Pose{Vec3(0, 0, 0.041), Quaternion::Identity()});
  parts.push_back(palm);
  return parts;
}

Observation render(const WorldState& state, const geometry::CameraModel& cam, const RenderOptions& options) {
  Observation obs;
  obs.width = cam.width;
  obs.height = cam.height;
  const std::size_t n = static_cast<std::size_t>(cam.width) * cam.height;
  obs.rgb.assign(3 * n, 0);
  obs.cloud.assign(3 * n, 0.0f);
  obs.valid.assign(n, 0);
  obs.proprio.ee = state.ee;
  obs.proprio.gripper_open = state.gripper_open ? 1.0 : 0.0;

  std::vector<const Object*> boxes;
  for (const auto& o : state.objects) boxes.push_back(&o);
  std::vector<Object> gripper;
  if (options.draw_gripper) {
    gripper = gripper_geometry(state);
    for (const auto& g : gripper) boxes.push_back(&g);
  }

  const geometry::Mat3 r = cam.extrinsics.topLeftCorner<3, 3>();
  const Vec3 eye = cam.extrinsics.topRightCorner<3, 1>();
  std::vector<double> depth(n, 0.0);
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      // Camera-frame direction with unit z, so the ray parameter is the depth.
      const Vec3 dir = r * Vec3((col - cam.cx()) / cam.fx(), (row - cam.cy()) / cam.fy(), 1.0);
      Hit hit;
      if (dir.z() < 0) {
        const double t = -eye.z() / dir.z();
        const Vec3 p = eye + t * dir;
        if (std::abs(p.x()) <= kTableHalfExtent && std::abs(p.y()) <= kTableHalfExtent) {
          hit.depth = t;
          hit.color = kTableColor;
        }
      }
      for (const Object* b : boxes) {
        double t;
        int axis;
        if (intersect_box(*b, eye, dir, t, axis) && t < hit.depth) {
          hit.depth = t;
          hit.color = shade(b->color, axis == 2 ? 1.0 : (axis == 0 ? 0.8 : 0.65));
        }
      }
      const std::size_t i = static_cast<std::size_t>(row) * cam.width + col;
      obs.rgb[3 * i] = hit.color[0];
      obs.rgb[3 * i + 1] = hit.color[1];
      obs.rgb[3 * i + 2] = hit.color[2];
      if (std::isfinite(hit.depth)) depth[i] = hit.depth;
    }
  }
  const geometry::OrganizedCloud cloud = geometry::depth_to_organized_cloud(depth, cam.height, cam.width, cam);
  for (std::size_t i = 0; i < 3 * n; ++i) obs.cloud[i] = static_cast<float>(cloud.points[i]);
  obs.valid = cloud.valid;
  return obs;
}

bool operator==(const Observation& a, const Observation& b) {
  return a.width == b.width && a.height == b.height && a.rgb == b.rgb && a.cloud == b.cloud && a.valid == b.valid &&
         a.proprio.ee.translation == b.proprio.ee.translation &&
         a.proprio.ee.rotation.coeffs() == b.proprio.ee.rotation.coeffs() &&
         a.proprio.gripper_open == b.proprio.gripper_open;
}

}  // namespace arm::sim
