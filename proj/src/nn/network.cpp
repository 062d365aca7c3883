#include "arm/nn/network.hpp"

#include <cmath>

#include "arm/errors.hpp"
#include "arm/nn/ops.hpp"

namespace arm::nn {

NetworkSpec& NetworkSpec::conv(int channels, int kernel, int stride, bool norm, Activation act) {
  layers.push_back({LayerKind::kConv, channels, kernel, stride, norm, act});
  return *this;
}
NetworkSpec& NetworkSpec::dense(int nodes, Activation act, bool norm) {
  layers.push_back({LayerKind::kDense, nodes, 1, 1, norm, act});
  return *this;
}
NetworkSpec& NetworkSpec::residual(int channels, int kernel, int stride) {
  layers.push_back({LayerKind::kResidual, channels, kernel, stride, true, Activation::kLeakyRelu});
  return *this;
}
NetworkSpec& NetworkSpec::max_pool(int window) {
  layers.push_back({LayerKind::kMaxPool, 0, 1, window, false, Activation::kNone});
  return *this;
}
NetworkSpec& NetworkSpec::global_max_pool() {
  layers.push_back({LayerKind::kGlobalMaxPool, 0, 1, 1, false, Activation::kNone});
  return *this;
}
NetworkSpec& NetworkSpec::upsample() {
  layers.push_back({LayerKind::kUpsample, 0, 1, 1, false, Activation::kNone});
  return *this;
}
NetworkSpec& NetworkSpec::activation(Activation act) {
  layers.push_back({LayerKind::kActivation, 0, 1, 1, false, act});
  return *this;
}
NetworkSpec& NetworkSpec::flatten() {
  layers.push_back({LayerKind::kFlatten, 0, 1, 1, false, Activation::kNone});
  return *this;
}
NetworkSpec& NetworkSpec::skip_push() {
  layers.push_back({LayerKind::kSkipPush, 0, 1, 1, false, Activation::kNone});
  return *this;
}
NetworkSpec& NetworkSpec::skip_concat() {
  layers.push_back({LayerKind::kSkipConcat, 0, 1, 1, false, Activation::kNone});
  return *this;
}

namespace {

std::string layer_name(const std::string& prefix, std::size_t index) {
  return prefix + "." + std::to_string(index);
}

int conv_out(int size, int kernel, int stride) { return (size + 2 * (kernel / 2) - kernel) / stride + 1; }

void check(bool ok, std::size_t index, const std::string& what) {
  if (!ok) throw ShapeError("layer " + std::to_string(index) + ": " + what);
}

// Walks the spec computing shapes; `visit` sees (index, layer, input shape).
template <class Visit>
Shape walk_shapes(const NetworkSpec& spec, Shape shape, Visit&& visit) {
  std::vector<Shape> skips;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    visit(i, l, shape);
    switch (l.kind) {
      case LayerKind::kConv:
      case LayerKind::kResidual:
        check(shape.size() == 4, i, "convolution needs N x C x H x W input, got " + to_string(shape));
        check(l.channels > 0 && l.kernel % 2 == 1 && l.stride >= 1, i, "invalid convolution parameters");
        shape = {shape[0], l.channels, conv_out(shape[2], l.kernel, l.stride), conv_out(shape[3], l.kernel, l.stride)};
        check(shape[2] > 0 && shape[3] > 0, i, "input too small");
        break;
      case LayerKind::kDense:
        check(shape.size() == 2, i, "dense needs N x F input, got " + to_string(shape));
        check(l.channels > 0, i, "dense needs a positive node count");
        shape = {shape[0], l.channels};
        break;
      case LayerKind::kMaxPool:
        check(shape.size() == 4 && shape[2] % l.stride == 0 && shape[3] % l.stride == 0, i,
              "max pool window does not divide " + to_string(shape));
        shape = {shape[0], shape[1], shape[2] / l.stride, shape[3] / l.stride};
        break;
      case LayerKind::kGlobalMaxPool:
        check(shape.size() == 4, i, "global max pool needs rank-4 input");
        shape = {shape[0], shape[1]};
        break;
      case LayerKind::kUpsample:
        check(shape.size() == 4, i, "upsample needs rank-4 input");
        shape = {shape[0], shape[1], shape[2] * 2, shape[3] * 2};
        break;
      case LayerKind::kActivation:
        break;
      case LayerKind::kFlatten: {
        int per = 1;
        for (std::size_t d = 1; d < shape.size(); ++d) per *= shape[d];
        shape = {shape[0], per};
        break;
      }
      case LayerKind::kSkipPush:
        skips.push_back(shape);
        break;
      case LayerKind::kSkipConcat: {
        check(!skips.empty(), i, "skip concat without a matching push");
        const Shape saved = skips.back();
        skips.pop_back();
        check(saved.size() == shape.size() && saved.size() == 4 && saved[2] == shape[2] && saved[3] == shape[3], i,
              "skip shape " + to_string(saved) + " does not match " + to_string(shape));
        shape[1] += saved[1];
        break;
      }
    }
  }
  if (!skips.empty()) throw ShapeError("network leaves unconsumed skip connections");
  return shape;
}

Tensor uniform_tensor(Shape shape, double bound, Rng& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Real>(dist(rng));
  return t;
}

void add_conv(ParamSet& params, const std::string& name, const std::string& suffix, int out, int in, int k,
              Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in * k * k));
  params.add(name + ".w" + suffix, uniform_tensor({out, in, k, k}, bound, rng));
  params.add(name + ".b" + suffix, Tensor({out}));
}

void add_norm(ParamSet& params, const std::string& name, const std::string& suffix, int channels) {
  params.add(name + ".g" + suffix, Tensor({channels}, Real(1)));
  params.add(name + ".beta" + suffix, Tensor({channels}));
}

Var conv_block(const Bound& p, const std::string& name, const std::string& suffix, const Var& x, int stride,
               bool norm) {
  Var y = conv2d(x, p(name + ".w" + suffix), p(name + ".b" + suffix), stride);
  if (norm) y = layer_norm(y, p(name + ".g" + suffix), p(name + ".beta" + suffix));
  return y;
}

}  // namespace

Shape output_shape(const NetworkSpec& spec, const Shape& input) {
  return walk_shapes(spec, input, [](std::size_t, const LayerSpec&, const Shape&) {});
}

void init_params(const NetworkSpec& spec, const Shape& input, const std::string& prefix, ParamSet& params,
                 Rng& rng) {
  walk_shapes(spec, input, [&](std::size_t i, const LayerSpec& l, const Shape& in) {
    const std::string name = layer_name(prefix, i);
    switch (l.kind) {
      case LayerKind::kConv:
        add_conv(params, name, "", l.channels, in[1], l.kernel, rng);
        if (l.layer_norm) add_norm(params, name, "", l.channels);
        break;
      case LayerKind::kResidual:
        add_conv(params, name, "1", l.channels, in[1], l.kernel, rng);
        add_norm(params, name, "1", l.channels);
        add_conv(params, name, "2", l.channels, l.channels, l.kernel, rng);
        add_norm(params, name, "2", l.channels);
        if (l.stride != 1 || in[1] != l.channels) add_conv(params, name, "s", l.channels, in[1], 1, rng);
        break;
      case LayerKind::kDense: {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in[1]));
        params.add(name + ".w", uniform_tensor({l.channels, in[1]}, bound, rng));
        params.add(name + ".b", Tensor({l.channels}));
        if (l.layer_norm) add_norm(params, name, "", l.channels);
        break;
      }
      default:
        break;
    }
  });
}

Var apply_activation(const Var& x, Activation act) {
  switch (act) {
    case Activation::kNone:
      return x;
    case Activation::kLeakyRelu:
      return leaky_relu(x);
    case Activation::kTanh:
      return tanh(x);
    case Activation::kSigmoid:
      return sigmoid(x);
    case Activation::kSoftplus:
      return softplus(x);
  }
  return x;
}

Var forward(const NetworkSpec& spec, const Bound& p, const std::string& prefix, const Var& input) {
  output_shape(spec, input.shape());  // validates before any work is recorded
  std::vector<Var> skips;
  Var x = input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string name = layer_name(prefix, i);
    switch (l.kind) {
      case LayerKind::kConv:
        x = apply_activation(conv_block(p, name, "", x, l.stride, l.layer_norm), l.activation);
        break;
      case LayerKind::kResidual: {
        Var h = leaky_relu(conv_block(p, name, "1", x, l.stride, true));
        h = conv_block(p, name, "2", h, 1, true);
        Var shortcut = (l.stride != 1 || x.dim(1) != l.channels) ? conv_block(p, name, "s", x, l.stride, false) : x;
        x = leaky_relu(h + shortcut);
        break;
      }
      case LayerKind::kDense: {
        Var y = linear(x, p(name + ".w"), p(name + ".b"));
        if (l.layer_norm) y = layer_norm(y, p(name + ".g"), p(name + ".beta"));
        x = apply_activation(y, l.activation);
        break;
      }
      case LayerKind::kMaxPool:
        x = max_pool2d(x, l.stride);
        break;
      case LayerKind::kGlobalMaxPool:
        x = global_max_pool(x);
        break;
      case LayerKind::kUpsample:
        x = upsample2x(x);
        break;
      case LayerKind::kActivation:
        x = apply_activation(x, l.activation);
        break;
      case LayerKind::kFlatten:
        x = flatten(x);
        break;
      case LayerKind::kSkipPush:
        skips.push_back(x);
        break;
      case LayerKind::kSkipConcat: {
        Var saved = skips.back();
        skips.pop_back();
        x = concat_channels({x, saved});
        break;
      }
    }
  }
  return x;
}

Tensor forward(const NetworkSpec& spec, const ParamSet& params, const std::string& prefix, const Tensor& input) {
  Tape tape;
  Bound bound(tape, params);
  return forward(spec, bound, prefix, tape.constant_ref(input)).value();
}

}  // namespace arm::nn
