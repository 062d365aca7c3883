#pragma once

// Declarative layer stacks. A NetworkSpec is an ordered list of layers; skip
// connections are expressed with a push/concat stack so encoder-decoder nets
// stay a single flat description.

#include <random>
#include <string>
#include <vector>

#include "arm/nn/params.hpp"

namespace arm::nn {

enum class Activation { kNone, kLeakyRelu, kTanh, kSigmoid, kSoftplus };

enum class LayerKind {
  kConv,
  kDense,
  kResidual,
  kMaxPool,
  kGlobalMaxPool,
  kUpsample,
  kActivation,
  kFlatten,
  kSkipPush,
  kSkipConcat,
};

struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  int channels = 0;  // output channels (conv, residual) or nodes (dense)
  int kernel = 3;
  int stride = 1;    // also the window of kMaxPool
  bool layer_norm = false;
  Activation activation = Activation::kNone;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;

  NetworkSpec& conv(int channels, int kernel, int stride, bool norm = true,
                    Activation act = Activation::kLeakyRelu);
  NetworkSpec& dense(int nodes, Activation act = Activation::kLeakyRelu, bool norm = false);
  NetworkSpec& residual(int channels, int kernel, int stride);
  NetworkSpec& max_pool(int window);
  NetworkSpec& global_max_pool();
  NetworkSpec& upsample();
  NetworkSpec& activation(Activation act);
  NetworkSpec& flatten();
  NetworkSpec& skip_push();
  NetworkSpec& skip_concat();

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

using Rng = std::mt19937_64;

/// Shape produced for `input` (batch dimension included); throws ShapeError on mismatch.
Shape output_shape(const NetworkSpec& spec, const Shape& input);

/// Fan-in scaled uniform weights, zero biases, unit normalization gains.
void init_params(const NetworkSpec& spec, const Shape& input, const std::string& prefix, ParamSet& params,
                 Rng& rng);

Var forward(const NetworkSpec& spec, const Bound& params, const std::string& prefix, const Var& input);

/// Inference-only convenience wrapper.
Tensor forward(const NetworkSpec& spec, const ParamSet& params, const std::string& prefix, const Tensor& input);

Var apply_activation(const Var& x, Activation act);

}  // namespace arm::nn
