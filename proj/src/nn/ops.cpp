#include "arm/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arm/errors.hpp"
#include "arm/nn/kernels.hpp"

namespace arm::nn {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

void require_same(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + to_string(a.shape()) + " and " +
                     to_string(b.shape()) + " differ");
  }
}

struct ConvGeometry {
  int channels, height, width, kernel, stride, pad, out_h, out_w;
  int patch() const { return channels * kernel * kernel; }
  int out_pixels() const { return out_h * out_w; }
  bool direct() const { return kernel == 1 && stride == 1; }
};

// Output columns [lo, hi) read input columns inside the image for kernel offset kx.
void valid_columns(const ConvGeometry& g, int kx, int& lo, int& hi) {
  const int off = kx - g.pad;
  lo = off >= 0 ? 0 : (-off + g.stride - 1) / g.stride;
  const int last = g.width - 1 - off;
  hi = last < 0 ? 0 : last / g.stride + 1;
  hi = std::clamp(hi, lo, g.out_w);
}

void im2col(const Real* src, const ConvGeometry& g, Real* col) {
  const int hw = g.out_pixels();
  for (int c = 0; c < g.channels; ++c) {
    const Real* plane = src + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        Real* dst = col + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        int lo, hi;
        valid_columns(g, kx, lo, hi);
        const int off = kx - g.pad;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          Real* row = dst + oy * g.out_w;
          if (iy < 0 || iy >= g.height) {
            std::fill(row, row + g.out_w, Real(0));
            continue;
          }
          const Real* srow = plane + static_cast<std::size_t>(iy) * g.width + off;
          std::fill(row, row + lo, Real(0));
          if (g.stride == 1) {
            std::copy(srow + lo, srow + hi, row + lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) row[ox] = srow[ox * g.stride];
          }
          std::fill(row + hi, row + g.out_w, Real(0));
        }
      }
    }
  }
}

void col2im_add(const Real* col, const ConvGeometry& g, Real* dst) {
  const int hw = g.out_pixels();
  for (int c = 0; c < g.channels; ++c) {
    Real* plane = dst + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        const Real* src = col + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        int lo, hi;
        valid_columns(g, kx, lo, hi);
        const int off = kx - g.pad;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.height) continue;
          Real* drow = plane + static_cast<std::size_t>(iy) * g.width + off;
          const Real* srow = src + oy * g.out_w;
          if (g.stride == 1) {
            for (int ox = lo; ox < hi; ++ox) drow[ox] += srow[ox];
          } else {
            for (int ox = lo; ox < hi; ++ox) drow[ox * g.stride] += srow[ox];
          }
        }
      }
    }
  }
}

template <class F, class D>
Var unary(const Var& x, F f, D df) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  return x.tape().record(std::move(y), {x}, [x, df](Tape& t, const Tensor& dy) {
    const Tensor& xv = t.value(x);
    Tensor& dx = t.grad(x);
    for (std::size_t i = 0; i < xv.size(); ++i) dx[i] += dy[i] * df(xv[i]);
  });
}

Real stable_softplus(Real v) { return std::max(v, Real(0)) + std::log1p(std::exp(-std::abs(v))); }
Real stable_sigmoid(Real v) {
  if (v >= 0) return Real(1) / (Real(1) + std::exp(-v));
  const Real e = std::exp(v);
  return e / (Real(1) + e);
}

std::size_t per_sample(const Tensor& t) { return t.size() / static_cast<std::size_t>(t.dim(0)); }

}  // namespace

Var conv2d(const Var& x, const Var& w, const Var& b, int stride) {
  const Tensor& X = x.value();
  const Tensor& W = w.value();
  require(X.rank() == 4, "conv2d: input must be N x C x H x W, got " + to_string(X.shape()));
  require(W.rank() == 4 && W.dim(1) == X.dim(1) && W.dim(2) == W.dim(3) && W.dim(2) % 2 == 1,
          "conv2d: weight " + to_string(W.shape()) + " incompatible with input " + to_string(X.shape()));
  require(b.value().size() == static_cast<std::size_t>(W.dim(0)), "conv2d: bias size mismatch");
  require(stride >= 1, "conv2d: stride must be positive");
  const int n_batch = X.dim(0);
  const int out_ch = W.dim(0);
  ConvGeometry g{X.dim(1), X.dim(2), X.dim(3), W.dim(2), stride, W.dim(2) / 2, 0, 0};
  g.out_h = (g.height + 2 * g.pad - g.kernel) / stride + 1;
  g.out_w = (g.width + 2 * g.pad - g.kernel) / stride + 1;
  require(g.out_h > 0 && g.out_w > 0, "conv2d: input too small");

  const int hw = g.out_pixels();
  const int patch = g.patch();
  const std::size_t in_stride = static_cast<std::size_t>(g.channels) * g.height * g.width;
  Tensor Y({n_batch, out_ch, g.out_h, g.out_w});
  std::vector<Real> col(g.direct() ? 0 : static_cast<std::size_t>(patch) * hw);
  const Real* bias = b.value().data();
  for (int n = 0; n < n_batch; ++n) {
    const Real* xn = X.data() + n * in_stride;
    const Real* cp = xn;
    if (!g.direct()) {
      im2col(xn, g, col.data());
      cp = col.data();
    }
    Real* yn = Y.data() + static_cast<std::size_t>(n) * out_ch * hw;
    for (int o = 0; o < out_ch; ++o) std::fill(yn + o * hw, yn + (o + 1) * hw, bias[o]);
    kernels::gemm(out_ch, hw, patch, W.data(), patch, 1, cp, hw, yn, hw);
  }

  return x.tape().record(std::move(Y), {x, w, b}, [x, w, b, g, n_batch, out_ch](Tape& t, const Tensor& dy) {
    const Tensor& X = t.value(x);
    const Tensor& W = t.value(w);
    const int hw = g.out_pixels();
    const int patch = g.patch();
    const std::size_t in_stride = static_cast<std::size_t>(g.channels) * g.height * g.width;
    Tensor* dX = t.requires_grad(x) ? &t.grad(x) : nullptr;
    Tensor* dW = t.requires_grad(w) ? &t.grad(w) : nullptr;
    Tensor* dB = t.requires_grad(b) ? &t.grad(b) : nullptr;
    std::vector<Real> col, dcol;
    if (!g.direct()) {
      if (dW) col.resize(static_cast<std::size_t>(patch) * hw);
      if (dX) dcol.resize(static_cast<std::size_t>(patch) * hw);
    }
    for (int n = 0; n < n_batch; ++n) {
      const Real* dyn = dy.data() + static_cast<std::size_t>(n) * out_ch * hw;
      if (dB) {
        for (int o = 0; o < out_ch; ++o) {
          Real s = 0;
          for (int i = 0; i < hw; ++i) s += dyn[o * hw + i];
          (*dB)[o] += s;
        }
      }
      const Real* xn = X.data() + n * in_stride;
      if (dW) {
        const Real* cp = xn;
        if (!g.direct()) {
          im2col(xn, g, col.data());
          cp = col.data();
        }
        kernels::gemm_nt(out_ch, patch, hw, dyn, hw, cp, hw, dW->data(), patch);
      }
      if (dX) {
        Real* dxn = dX->data() + n * in_stride;
        if (g.direct()) {
          kernels::gemm(patch, hw, out_ch, W.data(), 1, patch, dyn, hw, dxn, hw);
        } else {
          std::fill(dcol.begin(), dcol.end(), Real(0));
          kernels::gemm(patch, hw, out_ch, W.data(), 1, patch, dyn, hw, dcol.data(), hw);
          col2im_add(dcol.data(), g, dxn);
        }
      }
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  const Tensor& X = x.value();
  const Tensor& W = w.value();
  require(X.rank() == 2, "linear: input must be N x F, got " + to_string(X.shape()));
  require(W.rank() == 2 && W.dim(1) == X.dim(1),
          "linear: weight " + to_string(W.shape()) + " incompatible with input " + to_string(X.shape()));
  require(b.value().size() == static_cast<std::size_t>(W.dim(0)), "linear: bias size mismatch");
  const int n = X.dim(0), f = X.dim(1), o = W.dim(0);
  Tensor Y({n, o});
  for (int i = 0; i < n; ++i) std::copy(b.value().data(), b.value().data() + o, Y.data() + i * o);
  kernels::gemm_nt(n, o, f, X.data(), f, W.data(), f, Y.data(), o);
  return x.tape().record(std::move(Y), {x, w, b}, [x, w, b, n, f, o](Tape& t, const Tensor& dy) {
    if (t.requires_grad(b)) {
      Tensor& dB = t.grad(b);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < o; ++j) dB[j] += dy[i * o + j];
    }
    if (t.requires_grad(w)) {
      // dW[o,f] += dy^T[o,n] * x[n,f]
      kernels::gemm(o, f, n, dy.data(), 1, o, t.value(x).data(), f, t.grad(w).data(), f);
    }
    if (t.requires_grad(x)) {
      kernels::gemm(n, f, o, dy.data(), o, 1, t.value(w).data(), f, t.grad(x).data(), f);
    }
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias) {
  const Tensor& X = x.value();
  require(X.rank() >= 2, "layer_norm: input needs a batch and a channel dimension");
  const int n_batch = X.dim(0);
  const int channels = X.dim(1);
  require(gain.value().size() == static_cast<std::size_t>(channels) &&
              bias.value().size() == static_cast<std::size_t>(channels),
          "layer_norm: gain/bias must have one entry per channel");
  const std::size_t per = per_sample(X);
  const std::size_t inner = per / static_cast<std::size_t>(channels);
  Tensor xhat(X.shape());
  Tensor Y(X.shape());
  std::vector<Real> inv_std(static_cast<std::size_t>(n_batch));
  const Real* g = gain.value().data();
  const Real* be = bias.value().data();
  for (int n = 0; n < n_batch; ++n) {
    const Real* xn = X.data() + n * per;
    double m = 0;
    for (std::size_t i = 0; i < per; ++i) m += xn[i];
    m /= static_cast<double>(per);
    double var = 0;
    for (std::size_t i = 0; i < per; ++i) var += (xn[i] - m) * (xn[i] - m);
    var /= static_cast<double>(per);
    const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
    inv_std[static_cast<std::size_t>(n)] = static_cast<Real>(inv);
    Real* hn = xhat.data() + n * per;
    Real* yn = Y.data() + n * per;
    for (int c = 0; c < channels; ++c) {
      for (std::size_t i = c * inner; i < (c + 1) * inner; ++i) {
        hn[i] = static_cast<Real>((xn[i] - m) * inv);
        yn[i] = g[c] * hn[i] + be[c];
      }
    }
  }
  return x.tape().record(
      std::move(Y), {x, gain, bias},
      [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std), n_batch, channels, per,
       inner](Tape& t, const Tensor& dy) {
        const Real* g = t.value(gain).data();
        Tensor* dG = t.requires_grad(gain) ? &t.grad(gain) : nullptr;
        Tensor* dBe = t.requires_grad(bias) ? &t.grad(bias) : nullptr;
        Tensor* dX = t.requires_grad(x) ? &t.grad(x) : nullptr;
        std::vector<Real> dxhat(per);
        for (int n = 0; n < n_batch; ++n) {
          const Real* hn = xhat.data() + n * per;
          const Real* dyn = dy.data() + n * per;
          double m1 = 0, m2 = 0;
          for (int c = 0; c < channels; ++c) {
            double sg = 0, sb = 0;
            for (std::size_t i = c * inner; i < (c + 1) * inner; ++i) {
              sg += dyn[i] * hn[i];
              sb += dyn[i];
              dxhat[i] = dyn[i] * g[c];
              m1 += dxhat[i];
              m2 += dxhat[i] * hn[i];
            }
            if (dG) (*dG)[c] += static_cast<Real>(sg);
            if (dBe) (*dBe)[c] += static_cast<Real>(sb);
          }
          if (!dX) continue;
          m1 /= static_cast<double>(per);
          m2 /= static_cast<double>(per);
          const Real inv = inv_std[static_cast<std::size_t>(n)];
          Real* dxn = dX->data() + n * per;
          for (std::size_t i = 0; i < per; ++i) {
            dxn[i] += inv * static_cast<Real>(dxhat[i] - m1 - hn[i] * m2);
          }
        }
      });
}

Var leaky_relu(const Var& x, Real slope) {
  return unary(
      x, [slope](Real v) { return v > 0 ? v : slope * v; },
      [slope](Real v) { return v > 0 ? Real(1) : slope; });
}

Var tanh(const Var& x) {
  return unary(
      x, [](Real v) { return std::tanh(v); },
      [](Real v) {
        const Real y = std::tanh(v);
        return Real(1) - y * y;
      });
}

Var sigmoid(const Var& x) {
  return unary(x, stable_sigmoid, [](Real v) {
    const Real s = stable_sigmoid(v);
    return s * (Real(1) - s);
  });
}

Var softplus(const Var& x) { return unary(x, stable_softplus, stable_sigmoid); }

Var log_sigmoid(const Var& x) {
  return unary(
      x, [](Real v) { return -stable_softplus(-v); }, [](Real v) { return stable_sigmoid(-v); });
}

Var exp(const Var& x) {
  return unary(
      x, [](Real v) { return std::exp(v); }, [](Real v) { return std::exp(v); });
}

Var square(const Var& x) {
  return unary(
      x, [](Real v) { return v * v; }, [](Real v) { return Real(2) * v; });
}

Var clamp(const Var& x, Real lo, Real hi) {
  return unary(
      x, [lo, hi](Real v) { return std::clamp(v, lo, hi); },
      [lo, hi](Real v) { return (v > lo && v < hi) ? Real(1) : Real(0); });
}

Var max_pool2d(const Var& x, int window) {
  const Tensor& X = x.value();
  require(X.rank() == 4, "max_pool2d: input must be rank 4");
  require(window >= 1 && X.dim(2) % window == 0 && X.dim(3) % window == 0,
          "max_pool2d: spatial dims " + to_string(X.shape()) + " not divisible by window");
  const int n = X.dim(0), c = X.dim(1), h = X.dim(2), w = X.dim(3);
  const int oh = h / window, ow = w / window;
  Tensor Y({n, c, oh, ow});
  std::vector<std::size_t> arg(Y.size());
  for (int i = 0; i < n * c; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * h * w;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        std::size_t best = base + static_cast<std::size_t>(oy * window) * w + ox * window;
        for (int dy = 0; dy < window; ++dy) {
          for (int dx = 0; dx < window; ++dx) {
            const std::size_t idx = base + static_cast<std::size_t>(oy * window + dy) * w + ox * window + dx;
            if (X[idx] > X[best]) best = idx;
          }
        }
        const std::size_t o = static_cast<std::size_t>(i) * oh * ow + oy * ow + ox;
        Y[o] = X[best];
        arg[o] = best;
      }
    }
  }
  return x.tape().record(std::move(Y), {x}, [x, arg = std::move(arg)](Tape& t, const Tensor& dy) {
    Tensor& dx = t.grad(x);
    for (std::size_t o = 0; o < arg.size(); ++o) dx[arg[o]] += dy[o];
  });
}

Var global_max_pool(const Var& x) {
  const Tensor& X = x.value();
  require(X.rank() == 4, "global_max_pool: input must be rank 4");
  const int n = X.dim(0), c = X.dim(1);
  const std::size_t hw = static_cast<std::size_t>(X.dim(2)) * X.dim(3);
  Tensor Y({n, c});
  std::vector<std::size_t> arg(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const Real* p = X.data() + i * hw;
    const std::size_t best = static_cast<std::size_t>(std::max_element(p, p + hw) - p);
    Y[i] = p[best];
    arg[i] = i * hw + best;
  }
  return x.tape().record(std::move(Y), {x}, [x, arg = std::move(arg)](Tape& t, const Tensor& dy) {
    Tensor& dx = t.grad(x);
    for (std::size_t o = 0; o < arg.size(); ++o) dx[arg[o]] += dy[o];
  });
}

Var upsample2x(const Var& x) {
  const Tensor& X = x.value();
  require(X.rank() == 4, "upsample2x: input must be rank 4");
  const int n = X.dim(0), c = X.dim(1), h = X.dim(2), w = X.dim(3);
  Tensor Y({n, c, 2 * h, 2 * w});
  for (int i = 0; i < n * c; ++i) {
    const Real* src = X.data() + static_cast<std::size_t>(i) * h * w;
    Real* dst = Y.data() + static_cast<std::size_t>(i) * 4 * h * w;
    for (int y = 0; y < 2 * h; ++y)
      for (int xx = 0; xx < 2 * w; ++xx) dst[y * 2 * w + xx] = src[(y / 2) * w + xx / 2];
  }
  return x.tape().record(std::move(Y), {x}, [x, n, c, h, w](Tape& t, const Tensor& dy) {
    Tensor& dx = t.grad(x);
    for (int i = 0; i < n * c; ++i) {
      Real* dst = dx.data() + static_cast<std::size_t>(i) * h * w;
      const Real* src = dy.data() + static_cast<std::size_t>(i) * 4 * h * w;
      for (int y = 0; y < 2 * h; ++y)
        for (int xx = 0; xx < 2 * w; ++xx) dst[(y / 2) * w + xx / 2] += src[y * 2 * w + xx];
    }
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_channels: nothing to concatenate");
  const Tensor& first = parts.front().value();
  const int rank = first.rank();
  require(rank == 2 || rank == 4, "concat_channels: rank 2 or 4 expected");
  const int n = first.dim(0);
  const std::size_t inner = rank == 4 ? static_cast<std::size_t>(first.dim(2)) * first.dim(3) : 1;
  int total = 0;
  std::vector<int> widths;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    require(v.rank() == rank && v.dim(0) == n && (rank == 2 || (v.dim(2) == first.dim(2) && v.dim(3) == first.dim(3))),
            "concat_channels: incompatible part " + to_string(v.shape()) + " vs " + to_string(first.shape()));
    widths.push_back(v.dim(1));
    total += v.dim(1);
  }
  Shape out_shape = first.shape();
  out_shape[1] = total;
  Tensor Y(out_shape);
  const std::size_t out_per = static_cast<std::size_t>(total) * inner;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    const std::size_t len = static_cast<std::size_t>(widths[k]) * inner;
    for (int i = 0; i < n; ++i)
      std::copy(v.data() + i * len, v.data() + (i + 1) * len, Y.data() + i * out_per + offset);
    offset += len;
  }
  std::vector<Var> parents = parts;
  return parts.front().tape().record(
      std::move(Y), std::span<const Var>(parents),
      [parents, widths, inner, out_per, n](Tape& t, const Tensor& dy) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < parents.size(); ++k) {
          const std::size_t len = static_cast<std::size_t>(widths[k]) * inner;
          if (t.requires_grad(parents[k])) {
            Tensor& d = t.grad(parents[k]);
            for (int i = 0; i < n; ++i) {
              const Real* src = dy.data() + i * out_per + off;
              Real* dst = d.data() + i * len;
              for (std::size_t j = 0; j < len; ++j) dst[j] += src[j];
            }
          }
          off += len;
        }
      });
}

Var tile_spatial(const Var& v, int h, int w) {
  const Tensor& V = v.value();
  require(V.rank() == 2, "tile_spatial: input must be N x F");
  const int n = V.dim(0), f = V.dim(1);
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  Tensor Y({n, f, h, w});
  for (std::size_t i = 0; i < V.size(); ++i) std::fill(Y.data() + i * hw, Y.data() + (i + 1) * hw, V[i]);
  return v.tape().record(std::move(Y), {v}, [v, hw](Tape& t, const Tensor& dy) {
    Tensor& dv = t.grad(v);
    for (std::size_t i = 0; i < dv.size(); ++i) {
      Real s = 0;
      for (std::size_t j = 0; j < hw; ++j) s += dy[i * hw + j];
      dv[i] += s;
    }
  });
}

Var flatten(const Var& x) {
  const Tensor& X = x.value();
  require(X.rank() >= 1, "flatten: scalar input");
  const int n = X.dim(0);
  Tensor Y = X.reshaped({n, static_cast<int>(per_sample(X))});
  return x.tape().record(std::move(Y), {x}, [x](Tape& t, const Tensor& dy) {
    Tensor& dx = t.grad(x);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
  });
}

Var slice_channels(const Var& x, int begin, int count) {
  const Tensor& X = x.value();
  require(X.rank() >= 2 && begin >= 0 && count > 0 && begin + count <= X.dim(1),
          "slice_channels: range out of bounds for " + to_string(X.shape()));
  const int n = X.dim(0), c = X.dim(1);
  const std::size_t inner = per_sample(X) / static_cast<std::size_t>(c);
  Shape out_shape = X.shape();
  out_shape[1] = count;
  Tensor Y(out_shape);
  const std::size_t len = static_cast<std::size_t>(count) * inner;
  for (int i = 0; i < n; ++i) {
    const Real* src = X.data() + (static_cast<std::size_t>(i) * c + begin) * inner;
    std::copy(src, src + len, Y.data() + i * len);
  }
  return x.tape().record(std::move(Y), {x}, [x, n, c, begin, inner, len](Tape& t, const Tensor& dy) {
    Tensor& dx = t.grad(x);
    for (int i = 0; i < n; ++i) {
      Real* dst = dx.data() + (static_cast<std::size_t>(i) * c + begin) * inner;
      for (std::size_t j = 0; j < len; ++j) dst[j] += dy[i * len + j];
    }
  });
}

Var broadcast_samples(const Var& v, const Shape& shape) {
  const Tensor& V = v.value();
  require(!shape.empty() && V.size() == static_cast<std::size_t>(shape[0]),
          "broadcast_samples: need one value per sample of " + to_string(shape));
  Tensor Y(shape);
  const std::size_t per = Y.size() / V.size();
  for (std::size_t i = 0; i < V.size(); ++i) std::fill(Y.data() + i * per, Y.data() + (i + 1) * per, V[i]);
  return v.tape().record(std::move(Y), {v}, [v, per](Tape& t, const Tensor& dy) {
    Tensor& dv = t.grad(v);
    for (std::size_t i = 0; i < dv.size(); ++i) {
      Real s = 0;
      for (std::size_t j = 0; j < per; ++j) s += dy[i * per + j];
      dv[i] += s;
    }
  });
}

Var add(const Var& a, const Var& b) {
  require_same(a, b, "add");
  Tensor Y(a.value());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] += b.value()[i];
  return a.tape().record(std::move(Y), {a, b}, [a, b](Tape& t, const Tensor& dy) {
    for (const Var* p : {&a, &b}) {
      if (!t.requires_grad(*p)) continue;
      Tensor& d = t.grad(*p);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a, b, "sub");
  Tensor Y(a.value());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] -= b.value()[i];
  return a.tape().record(std::move(Y), {a, b}, [a, b](Tape& t, const Tensor& dy) {
    if (t.requires_grad(a)) {
      Tensor& d = t.grad(a);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
    }
    if (t.requires_grad(b)) {
      Tensor& d = t.grad(b);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= dy[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a, b, "mul");
  Tensor Y(a.value());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] *= b.value()[i];
  return a.tape().record(std::move(Y), {a, b}, [a, b](Tape& t, const Tensor& dy) {
    if (t.requires_grad(a)) {
      Tensor& d = t.grad(a);
      const Tensor& bv = t.value(b);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * bv[i];
    }
    if (t.requires_grad(b)) {
      Tensor& d = t.grad(b);
      const Tensor& av = t.value(a);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * av[i];
    }
  });
}

Var minimum(const Var& a, const Var& b) {
  require_same(a, b, "minimum");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor Y(av.shape());
  std::vector<char> take_a(av.size());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    take_a[i] = av[i] <= bv[i];
    Y[i] = take_a[i] ? av[i] : bv[i];
  }
  return a.tape().record(std::move(Y), {a, b}, [a, b, take_a = std::move(take_a)](Tape& t, const Tensor& dy) {
    if (t.requires_grad(a)) {
      Tensor& d = t.grad(a);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (take_a[i]) d[i] += dy[i];
    }
    if (t.requires_grad(b)) {
      Tensor& d = t.grad(b);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (!take_a[i]) d[i] += dy[i];
    }
  });
}

Var scale(const Var& x, Real s) {
  return unary(
      x, [s](Real v) { return v * s; }, [s](Real) { return s; });
}

Var add_scalar(const Var& x, Real s) {
  return unary(
      x, [s](Real v) { return v + s; }, [](Real) { return Real(1); });
}

Var sum(const Var& x) {
  double s = 0;
  for (Real v : x.value().values()) s += v;
  return x.tape().record(Tensor({1}, Real(s)), {x}, [x](Tape& t, const Tensor& dy) {
    Tensor& d = t.grad(x);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[0];
  });
}

Var mean(const Var& x) {
  const std::size_t n = x.value().size();
  require(n > 0, "mean: empty tensor");
  return scale(sum(x), Real(1) / static_cast<Real>(n));
}

Var sum_per_sample(const Var& x) {
  const Tensor& X = x.value();
  const int n = X.dim(0);
  const std::size_t per = per_sample(X);
  Tensor Y({n});
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < per; ++j) s += X[i * per + j];
    Y[static_cast<std::size_t>(i)] = static_cast<Real>(s);
  }
  return x.tape().record(std::move(Y), {x}, [x, per](Tape& t, const Tensor& dy) {
    Tensor& d = t.grad(x);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i / per];
  });
}

Var gather_per_sample(const Var& x, std::span<const int> flat_index) {
  const Tensor& X = x.value();
  const int n = X.dim(0);
  require(flat_index.size() == static_cast<std::size_t>(n), "gather_per_sample: one index per sample required");
  const std::size_t per = per_sample(X);
  Tensor Y({n});
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k = flat_index[static_cast<std::size_t>(i)];
    if (k < 0 || static_cast<std::size_t>(k) >= per) throw ContractError("gather_per_sample: index out of range");
    idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i) * per + static_cast<std::size_t>(k);
    Y[static_cast<std::size_t>(i)] = X[idx[static_cast<std::size_t>(i)]];
  }
  return x.tape().record(std::move(Y), {x}, [x, idx = std::move(idx)](Tape& t, const Tensor& dy) {
    Tensor& d = t.grad(x);
    for (std::size_t i = 0; i < idx.size(); ++i) d[idx[i]] += dy[i];
  });
}

}  // namespace arm::nn
