#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlds {

/// Uniform midpoint-rule discretization of a closed interval [a, b].
///
/// Cell k has midpoint a + (k + 1/2) h and weight h = (b - a) / n. Midpoints
/// never coincide with the endpoints, and for even n they never hit the
/// centre of a symmetric interval, which keeps coefficient fields such as
/// -|x|^{1/2} away from their singular point.
class Grid {
 public:
  Grid(double a, double b, std::size_t n);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double measure() const noexcept { return b_ - a_; }
  double step() const noexcept { return (b_ - a_) / static_cast<double>(points_.size()); }
  std::size_t size() const noexcept { return points_.size(); }

  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double point(std::size_t k) const { return points_.at(k); }
  double weight(std::size_t k) const { return weights_.at(k); }

  bool operator==(const Grid& other) const = default;

 private:
  double a_;
  double b_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Throws DomainError unless a < b (both finite) and n >= 1.
Grid build_grid(double a, double b, std::size_t n);

/// Quadrature sum of samples taken at the grid points.
double integrate(std::span<const double> samples, const Grid& grid);

}  // namespace nlds
