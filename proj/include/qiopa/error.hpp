#pragma once

#include <stdexcept>
#include <string>

namespace qiopa {

// Argument outside an operation's documented domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical procedure on otherwise valid input.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A photon-number series could not certify the requested tail mass within
// the configured maximum index.
class TruncationFailure : public NumericalFailure {
 public:
  TruncationFailure(const std::string& what, double achieved_bound)
      : NumericalFailure(what), achieved_bound_(achieved_bound) {}

  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

// Truncated Fock-space evolution leaked more probability than tolerated.
class CutoffTooSmall : public NumericalFailure {
 public:
  CutoffTooSmall(const std::string& what, double norm_leak)
      : NumericalFailure(what), norm_leak_(norm_leak) {}

  double norm_leak() const noexcept { return norm_leak_; }

 private:
  double norm_leak_;
};

class FitFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Too few shots survived a selection to form an estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qiopa
