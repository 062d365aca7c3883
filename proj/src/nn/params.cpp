#include "arm/nn/params.hpp"

#include "arm/errors.hpp"

namespace arm::nn {

void ParamSet::add(const std::string& name, Tensor value) {
  if (!entries_.emplace(name, std::move(value)).second) {
    throw ContractError("duplicate parameter '" + name + "'");
  }
}

Tensor& ParamSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamSet::at(const std::string& name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

std::size_t ParamSet::element_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& [name, t] : entries_) out.entries_.emplace(name, Tensor(t.shape()));
  return out;
}

bool ParamSet::all_finite() const {
  for (const auto& [name, t] : entries_)
    if (!t.all_finite()) return false;
  return true;
}

ParamSet ParamSet::subset(const std::string& prefix) const {
  ParamSet out;
  for (const auto& [name, t] : entries_)
    if (name.compare(0, prefix.size(), prefix) == 0) out.entries_.emplace(name, t);
  return out;
}

void ParamSet::merge(const ParamSet& other) {
  for (const auto& [name, t] : other.entries_) entries_[name] = t;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  auto ia = a.entries_.begin();
  for (auto ib = b.entries_.begin(); ib != b.entries_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.shape() != ib->second.shape()) return false;
    for (std::size_t i = 0; i < ia->second.size(); ++i)
      if (ia->second[i] != ib->second[i]) return false;
  }
  return true;
}

Bound::Bound(Tape& tape, const ParamSet& params, ParamSet* grads)
    : tape_(tape), params_(params), grads_(grads) {}

Var Bound::operator()(const std::string& name) const {
  auto it = cache_.find(name);
  if (it != cache_.end()) return it->second;
  const Tensor& value = params_.at(name);
  Var v = grads_ ? tape_.leaf(value, grads_->at(name)) : tape_.constant_ref(value);
  cache_.emplace(name, v);
  return v;
}

ParamSet gradients(const LossFn& loss_fn, const ParamSet& params) {
  ParamSet grads = params.zeros_like();
  Tape tape;
  Bound bound(tape, params, &grads);
  Var loss = loss_fn(bound);
  if (!loss.valid() || loss.value().size() != 1) {
    throw ContractError("gradients(): loss function must return a scalar");
  }
  tape.backward(loss);
  return grads;
}

void soft_update(ParamSet& target, const ParamSet& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("soft_update: tau must lie in (0, 1]");
  if (target.size() != online.size()) throw ShapeError("soft_update: parameter sets differ");
  const Real t = static_cast<Real>(tau);
  for (auto& [name, value] : target) {
    const Tensor& src = online.at(name);
    if (src.shape() != value.shape()) throw ShapeError("soft_update: shape mismatch for '" + name + "'");
    if (tau == 1.0) {
      value = src;
      continue;
    }
    for (std::size_t i = 0; i < value.size(); ++i) value[i] = t * src[i] + (Real(1) - t) * value[i];
  }
}

}  // namespace arm::nn
