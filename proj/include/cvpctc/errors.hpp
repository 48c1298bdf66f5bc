#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvpctc {

// Matrix handed to a gate constructor does not preserve the symplectic form.
class InvalidOp : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Covariance is not a physical state (asymmetric, indefinite, or violates
// the uncertainty bound).
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Wigner-marginal scan peaked on the edge of the requested window.
class OutOfWindow : public std::runtime_error {
 public:
  OutOfWindow(const std::string& what, double peak)
      : std::runtime_error(what), peak_(peak) {}
  double peak() const noexcept { return peak_; }

 private:
  double peak_;
};

// Measured position falls outside [x0, L).
class OutOfSegment : public std::out_of_range {
 public:
  OutOfSegment(const std::string& what, double x)
      : std::out_of_range(what), x_(x) {}
  double position() const noexcept { return x_; }

 private:
  double x_;
};

// Transition function did not reach a fixed point within the iteration bound.
class NonHalting : public std::runtime_error {
 public:
  NonHalting(const std::string& what, std::vector<std::size_t> trajectory)
      : std::runtime_error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<std::size_t>& trajectory() const noexcept { return trajectory_; }

 private:
  std::vector<std::size_t> trajectory_;
};

}  // namespace cvpctc
