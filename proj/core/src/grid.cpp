#include "nlds/grid.hpp"

#include <cmath>
#include <sstream>

#include "nlds/error.hpp"

namespace nlds {

Grid::Grid(double a, double b, std::size_t n) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream msg;
    msg << "invalid domain: need finite a < b, got (" << a << ", " << b << ")";
    throw DomainError(msg.str());
  }
  if (n == 0) throw DomainError("invalid domain: grid needs at least one cell");

  const double h = (b - a) / static_cast<double>(n);
  points_.resize(n);
  weights_.assign(n, h);
  for (std::size_t k = 0; k < n; ++k) points_[k] = a + (static_cast<double>(k) + 0.5) * h;
}

Grid build_grid(double a, double b, std::size_t n) { return Grid(a, b, n); }

double integrate(std::span<const double> samples, const Grid& grid) {
  if (samples.size() != grid.size()) {
    std::ostringstream msg;
    msg << "integrate: " << samples.size() << " samples for a grid of " << grid.size() << " points";
    throw DimensionError(msg.str());
  }
  double sum = 0.0;
  const auto& w = grid.weights();
  for (std::size_t k = 0; k < samples.size(); ++k) sum += samples[k] * w[k];
  return sum;
}

}  // namespace nlds
