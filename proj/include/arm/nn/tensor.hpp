#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arm::nn {

// Training runs in single precision; the ARM_REAL_F64 build of the library is
// used by the finite-difference gradient checks.
#if defined(ARM_REAL_F64)
using Real = double;
#else
using Real = float;
#endif

using Shape = std::vector<int>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major array. Image batches are laid out N x C x H x W.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Real fill = Real(0));
  Tensor(Shape shape, std::vector<Real> values);

  const Shape& shape() const noexcept { return shape_; }
  int rank() const noexcept { return static_cast<int>(shape_.size()); }
  int dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Real* data() noexcept { return data_.data(); }
  const Real* data() const noexcept { return data_.data(); }
  std::span<Real> values() noexcept { return data_; }
  std::span<const Real> values() const noexcept { return data_; }

  Real& operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  /// Element of a rank-4 tensor.
  Real& at(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
  Real at(int n, int c, int y, int x) const { return data_[offset(n, c, y, x)]; }

  void fill(Real v);
  Tensor reshaped(Shape shape) const;
  bool all_finite() const;

 private:
  std::size_t offset(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + y) * shape_[3] + x;
  }

  Shape shape_;
  std::vector<Real> data_;
};

}  // namespace arm::nn
