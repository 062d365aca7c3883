#pragma once

#include <functional>
#include <map>
#include <string>

#include "arm/nn/tape.hpp"

namespace arm::nn {

/// Named collection of trainable arrays, iterated in name order.
class ParamSet {
 public:
  using Map = std::map<std::string, Tensor>;

  void add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;

  Map::iterator begin() { return entries_.begin(); }
  Map::iterator end() { return entries_.end(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t element_count() const;

  ParamSet zeros_like() const;
  bool all_finite() const;
  /// Entries whose name starts with `prefix`.
  ParamSet subset(const std::string& prefix) const;
  /// Copies every entry of `other` into this set, replacing existing names.
  void merge(const ParamSet& other);

  friend bool operator==(const ParamSet& a, const ParamSet& b);

 private:
  Map entries_;
};

/// A ParamSet bound to a tape. With a gradient set every parameter is a leaf that
/// accumulates into it; without one the parameters enter as constants.
class Bound {
 public:
  Bound(Tape& tape, const ParamSet& params, ParamSet* grads = nullptr);

  Var operator()(const std::string& name) const;
  Tape& tape() const noexcept { return tape_; }
  bool trainable() const noexcept { return grads_ != nullptr; }

 private:
  Tape& tape_;
  const ParamSet& params_;
  ParamSet* grads_;
  mutable std::map<std::string, Var> cache_;
};

using LossFn = std::function<Var(const Bound&)>;

/// Reverse-mode gradient of a scalar loss with respect to every parameter.
ParamSet gradients(const LossFn& loss_fn, const ParamSet& params);

/// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(ParamSet& target, const ParamSet& online, double tau);

}  // namespace arm::nn
