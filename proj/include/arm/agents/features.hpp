#pragma once

// Observation -> network input conversion shared by every agent.
//
// RGB is scaled to [0, 1]. Cloud points are expressed relative to the workspace
// center in units of its half extent; invalid points become zero. Proprioception
// is 8 values: normalized end-effector position, canonical quaternion (x y z w)
// and the gripper-open flag.

#include <span>
#include <vector>

#include "arm/demo/keyframes.hpp"
#include "arm/nn/tensor.hpp"
#include "arm/sim/observation.hpp"
#include "arm/sim/world.hpp"

namespace arm::agents {

using nn::Real;
using nn::Tensor;

inline constexpr int kProprioSize = 8;
inline constexpr int kRawActionSize = 8;

struct ImageBatch {
  Tensor rgb;    // N x 3 x H x W
  Tensor cloud;  // N x 3 x H x W
  Tensor proprio;  // N x 8

  int size() const { return rgb.empty() ? 0 : rgb.dim(0); }
};

ImageBatch to_batch(std::span<const sim::Observation* const> observations, const sim::Workspace& ws);
ImageBatch to_batch(const sim::Observation& observation, const sim::Workspace& ws);

/// Window origin for a c x c crop nominally centered at `center`, clamped into the image.
demo::Pixel crop_origin(demo::Pixel center, int crop, int width, int height);

/// Per-sample c x c windows of an N x C x H x W tensor. Throws ContractError when c exceeds the image.
Tensor crop_tensor(const Tensor& images, std::span<const demo::Pixel> centers, int crop);

/// Crops both image streams; proprioception is copied unchanged.
ImageBatch crop_batch(const ImageBatch& batch, std::span<const demo::Pixel> centers, int crop);

/// Crop of raw observation data, copied verbatim.
struct CropPair {
  int size = 0;
  demo::Pixel origin;
  std::vector<std::uint8_t> rgb;   // c x c x 3
  std::vector<float> cloud;        // c x c x 3
  std::vector<std::uint8_t> valid;  // c x c
};

CropPair crop(const sim::Observation& observation, demo::Pixel center, int crop);

}  // namespace arm::agents
