#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlds {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid interval, grid size, or a parameter outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A dense operation asked for a matrix larger than its cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis check failed and the caller did not ask to force past it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical result that contradicts a structural guarantee (e.g. a Perron
/// vector with non-positive entries despite a positive spectral gap).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate, std::vector<double> last_iterate)
      : Error(what), last_estimate_(last_estimate), last_iterate_(std::move(last_iterate)) {}

  double last_estimate() const noexcept { return last_estimate_; }
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_estimate_;
  std::vector<double> last_iterate_;
};

/// One-sided limit ladder that failed to behave monotonically.
class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& what, std::vector<std::pair<double, double>> samples)
      : Error(what), samples_(std::move(samples)) {}

  /// (argument, value) pairs in ladder order.
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

 private:
  std::vector<std::pair<double, double>> samples_;
};

}  // namespace nlds
