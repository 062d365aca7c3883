#pragma once

#include <stdexcept>
#include <string>

namespace arm {

/// Tensor or image dimensions disagree with what an operation requires.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DegenerateQuaternion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite gradients or losses reached the optimizer.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EpisodeFinished : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DemoGenerationError : public std::runtime_error {
 public:
  DemoGenerationError(const std::string& what, unsigned long long seed)
      : std::runtime_error(what + " (seed " + std::to_string(seed) + ")"), seed_(seed) {}
  unsigned long long seed() const noexcept { return seed_; }

 private:
  unsigned long long seed_;
};

/// The policy produced a quaternion too close to zero to normalize; the caller should resample.
class ResampleSignal : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arm
