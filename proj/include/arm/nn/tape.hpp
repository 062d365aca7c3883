#pragma once

// Reverse-mode automatic differentiation over Tensor values.
//
// A Tape records every operation applied to its Vars. backward() walks the
// record in reverse creation order and accumulates gradients; parameter leaves
// forward their gradient into a caller-owned sink tensor.

#include <deque>
#include <functional>
#include <span>

#include "arm/nn/tensor.hpp"

namespace arm::nn {

class Tape;

class Var {
 public:
  Var() = default;

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  int id() const noexcept { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  int dim(int axis) const { return value().dim(axis); }
  bool requires_grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  /// Receives the gradient of the node being processed and accumulates into its parents.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Borrowed value; it must outlive the tape.
  Var constant_ref(const Tensor& value);
  /// Borrowed parameter whose gradient is accumulated into grad_sink.
  Var leaf(const Tensor& value, Tensor& grad_sink);
  /// Records an operation. The node requires a gradient iff any parent does.
  Var record(Tensor value, std::initializer_list<Var> parents, BackwardFn backward);
  Var record(Tensor value, std::span<const Var> parents, BackwardFn backward);

  const Tensor& value(const Var& v) const { return *node(v).value; }
  bool requires_grad(const Var& v) const { return node(v).requires_grad; }

  /// Gradient buffer of v, zero-initialized on first access.
  Tensor& grad(const Var& v);

  /// Seeds d(loss)/d(loss) = 1 and propagates. loss must hold a single element.
  void backward(const Var& loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* value = nullptr;
    Tensor grad;
    bool grad_ready = false;
    bool requires_grad = false;
    Tensor* sink = nullptr;
    BackwardFn backward;
  };

  Node& node(const Var& v);
  const Node& node(const Var& v) const;
  Var push(Node n);

  std::deque<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }
inline bool Var::requires_grad() const { return tape_->requires_grad(*this); }

}  // namespace arm::nn
