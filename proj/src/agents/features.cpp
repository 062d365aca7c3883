#include "arm/agents/features.hpp"

#include <algorithm>

#include "arm/errors.hpp"

namespace arm::agents {

ImageBatch to_batch(std::span<const sim::Observation* const> observations, const sim::Workspace& ws) {
  if (observations.empty()) throw ContractError("empty observation batch");
  const int n = static_cast<int>(observations.size());
  const int h = observations[0]->height, w = observations[0]->width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  ImageBatch b{Tensor({n, 3, h, w}), Tensor({n, 3, h, w}), Tensor({n, kProprioSize})};
  const geometry::Vec3 center = ws.center();
  const geometry::Vec3 half = ws.half_extent();
  for (int i = 0; i < n; ++i) {
    const sim::Observation& o = *observations[i];
    if (o.height != h || o.width != w) throw ShapeError("observations in a batch must share their size");
    Real* rgb = b.rgb.data() + static_cast<std::size_t>(i) * 3 * hw;
    Real* cloud = b.cloud.data() + static_cast<std::size_t>(i) * 3 * hw;
    for (std::size_t p = 0; p < hw; ++p) {
      for (int c = 0; c < 3; ++c) {
        rgb[c * hw + p] = static_cast<Real>(o.rgb[3 * p + c] / 255.0);
        cloud[c * hw + p] = o.valid[p] ? static_cast<Real>((o.cloud[3 * p + c] - center[c]) / half[c]) : Real(0);
      }
    }
    Real* z = b.proprio.data() + static_cast<std::size_t>(i) * kProprioSize;
    const geometry::Vec3 t = o.proprio.ee.translation;
    const geometry::Quaternion q = geometry::canonicalize(o.proprio.ee.rotation);
    for (int c = 0; c < 3; ++c) z[c] = static_cast<Real>((t[c] - center[c]) / half[c]);
    z[3] = static_cast<Real>(q.x());
    z[4] = static_cast<Real>(q.y());
    z[5] = static_cast<Real>(q.z());
    z[6] = static_cast<Real>(q.w());
    z[7] = static_cast<Real>(o.proprio.gripper_open);
  }
  return b;
}

ImageBatch to_batch(const sim::Observation& observation, const sim::Workspace& ws) {
  const sim::Observation* one[] = {&observation};
  return to_batch(one, ws);
}

demo::Pixel crop_origin(demo::Pixel center, int crop, int width, int height) {
  if (crop > width || crop > height || crop < 1) throw ContractError("crop size exceeds the image");
  return {std::clamp(center.x - crop / 2, 0, width - crop), std::clamp(center.y - crop / 2, 0, height - crop)};
}

Tensor crop_tensor(const Tensor& images, std::span<const demo::Pixel> centers, int crop) {
  if (images.rank() != 4) throw ShapeError("crop needs N x C x H x W images");
  const int n = images.dim(0), ch = images.dim(1), h = images.dim(2), w = images.dim(3);
  if (static_cast<int>(centers.size()) != n) throw ShapeError("one crop center per sample required");
  Tensor out({n, ch, crop, crop});
  for (int i = 0; i < n; ++i) {
    const demo::Pixel o = crop_origin(centers[i], crop, w, h);
    for (int c = 0; c < ch; ++c)
      for (int y = 0; y < crop; ++y) {
        const Real* src = images.data() + ((static_cast<std::size_t>(i) * ch + c) * h + o.y + y) * w + o.x;
        std::copy(src, src + crop, &out.at(i, c, y, 0));
      }
  }
  return out;
}

ImageBatch crop_batch(const ImageBatch& batch, std::span<const demo::Pixel> centers, int crop) {
  return {crop_tensor(batch.rgb, centers, crop), crop_tensor(batch.cloud, centers, crop), batch.proprio};
}

CropPair crop(const sim::Observation& obs, demo::Pixel center, int c) {
  CropPair out;
  out.size = c;
  out.origin = crop_origin(center, c, obs.width, obs.height);
  for (int y = 0; y < c; ++y) {
    for (int x = 0; x < c; ++x) {
      const std::size_t p = static_cast<std::size_t>(out.origin.y + y) * obs.width + (out.origin.x + x);
      for (int k = 0; k < 3; ++k) {
        out.rgb.push_back(obs.rgb[3 * p + k]);
        out.cloud.push_back(obs.cloud[3 * p + k]);
      }
      out.valid.push_back(obs.valid[p]);
    }
  }
  return out;
}

}  // namespace arm::agents
