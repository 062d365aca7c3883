#pragma once

// Differentiable operations recorded on a Tape. Image tensors are N x C x H x W;
// feature tensors are N x F. Binary elementwise ops require identical shapes.

#include <span>
#include <vector>

#include "arm/nn/tape.hpp"

namespace arm::nn {

inline constexpr Real kLeakySlope = Real(0.01);
inline constexpr Real kNormEpsilon = Real(1e-5);

/// Zero-padded convolution with pad = kernel / 2. w is O x C x k x k, b has O entries.
Var conv2d(const Var& x, const Var& w, const Var& b, int stride);
/// x: N x F, w: O x F, b: O.
Var linear(const Var& x, const Var& w, const Var& b);
/// Per-sample normalization over every non-batch element with per-channel (dim 1) gain and bias.
Var layer_norm(const Var& x, const Var& gain, const Var& bias);

Var leaky_relu(const Var& x, Real slope = kLeakySlope);
Var tanh(const Var& x);
Var sigmoid(const Var& x);
Var softplus(const Var& x);
Var log_sigmoid(const Var& x);
Var exp(const Var& x);
Var square(const Var& x);
/// Gradient is zero outside [lo, hi].
Var clamp(const Var& x, Real lo, Real hi);

Var max_pool2d(const Var& x, int window);
Var global_max_pool(const Var& x);
Var upsample2x(const Var& x);
Var concat_channels(const std::vector<Var>& parts);
/// N x F -> N x F x h x w.
Var tile_spatial(const Var& v, int h, int w);
Var flatten(const Var& x);
/// Slice [begin, begin + count) along dim 1.
Var slice_channels(const Var& x, int begin, int count);
/// Per-sample vector (N) expanded to `shape`, whose leading dimension is N.
Var broadcast_samples(const Var& v, const Shape& shape);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var minimum(const Var& a, const Var& b);
Var scale(const Var& x, Real s);
Var add_scalar(const Var& x, Real s);

Var sum(const Var& x);
Var mean(const Var& x);
/// Sum over every non-batch element; result has N entries.
Var sum_per_sample(const Var& x);
/// Picks one element per sample from the flattened non-batch block of x.
Var gather_per_sample(const Var& x, std::span<const int> flat_index);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator*(const Var& a, Real s) { return scale(a, s); }
inline Var operator*(Real s, const Var& a) { return scale(a, s); }

}  // namespace arm::nn
