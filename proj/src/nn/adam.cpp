#include "arm/nn/adam.hpp"

#include <cmath>

#include "arm/errors.hpp"

namespace arm::nn {

void Adam::step(ParamSet& params, const ParamSet& grads) {
  for (const auto& [name, g] : grads) {
    if (!g.all_finite()) throw TrainingDivergence("non-finite gradient for " + name);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double b1 = config_.beta1, b2 = config_.beta2;
  for (auto& [name, p] : params) {
    if (!grads.contains(name)) continue;
    const Tensor& g = grads.at(name);
    if (g.shape() != p.shape()) throw ShapeError("gradient shape mismatch for " + name);
    if (!m_.contains(name)) {
      m_.add(name, Tensor(p.shape()));
      v_.add(name, Tensor(p.shape()));
    }
    Tensor& m = m_.at(name);
    Tensor& v = v_.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m[i] + (1.0 - b1) * gi;
      const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
      m[i] = static_cast<Real>(mi);
      v[i] = static_cast<Real>(vi);
      p[i] -= static_cast<Real>(config_.lr * (mi / c1) / (std::sqrt(vi / c2) + config_.eps));
    }
  }
}

}  // namespace arm::nn
