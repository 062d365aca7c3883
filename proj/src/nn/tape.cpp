#include "arm/nn/tape.hpp"

#include "arm/errors.hpp"

namespace arm::nn {

Tape::Node& Tape::node(const Var& v) {
  if (&v.tape() != this || v.id() < 0 || static_cast<std::size_t>(v.id()) >= nodes_.size()) {
    throw ContractError("variable does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.id())];
}

const Tape::Node& Tape::node(const Var& v) const {
  return const_cast<Tape*>(this)->node(v);
}

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  Node& stored = nodes_.back();
  if (stored.value == nullptr) stored.value = &stored.owned;
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::constant_ref(const Tensor& value) {
  Node n;
  n.value = &value;
  return push(std::move(n));
}

Var Tape::leaf(const Tensor& value, Tensor& grad_sink) {
  if (grad_sink.shape() != value.shape()) {
    throw ShapeError("gradient sink " + to_string(grad_sink.shape()) + " does not match parameter " +
                     to_string(value.shape()));
  }
  Node n;
  n.value = &value;
  n.requires_grad = true;
  n.sink = &grad_sink;
  return push(std::move(n));
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> parents, BackwardFn backward) {
  Node n;
  n.owned = std::move(value);
  for (const Var& p : parents) {
    if (p.valid() && node(p).requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

Tensor& Tape::grad(const Var& v) {
  Node& n = node(v);
  if (n.sink != nullptr) return *n.sink;
  if (!n.grad_ready) {
    n.grad = Tensor(n.value->shape());
    n.grad_ready = true;
  }
  return n.grad;
}

void Tape::backward(const Var& loss) {
  Node& root = node(loss);
  if (root.value->size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + to_string(root.value->shape()));
  }
  if (!root.requires_grad) return;
  grad(loss)[0] += Real(1);
  for (std::size_t i = static_cast<std::size_t>(loss.id()) + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || !n.grad_ready) continue;
    n.backward(*this, n.grad);
    n.grad = Tensor();  // release activation gradients as soon as they are consumed
    n.grad_ready = false;
  }
}

}  // namespace arm::nn
