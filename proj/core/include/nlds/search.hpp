#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "nlds/grid.hpp"

namespace nlds {

/// One-sided approach offsets used to bracket limits at a threshold.
inline constexpr std::array<double, 6> kEpsilonLadder{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

struct SupEstimate {
  double value = 0.0;
  double argmax = 0.0;
  /// Largest sample at the grid nodes and its index.
  double grid_value = 0.0;
  std::size_t grid_index = 0;
};

/// sup of f over [a, b]: best of the grid nodes and both endpoints, then a
/// Brent search between the neighbours of the best candidate.
SupEstimate refine_sup(const std::function<double(double)>& f, const Grid& grid);

struct LadderOutcome {
  /// (base + eps, g(base + eps)) for each eps of the ladder.
  std::vector<std::pair<double, double>> samples;
  /// The final sample exceeds threshold + margin.
  bool above = false;
};

/// Samples g at base + eps along kEpsilonLadder. The values must not decrease
/// as eps shrinks (up to 1e-10 relative); otherwise ClassificationError with
/// the samples. A non-finite sample counts as divergence upward.
LadderOutcome epsilon_ladder(const std::function<double(double)>& g, double base, double threshold, double margin);

struct RootResult {
  double root = 0.0;
  std::size_t iterations = 0;
};

/// Root of a decreasing f on (base, inf): the upper bracket comes from doubling
/// base + 1e-6 upward until f < 0, then bisection to width tol (cap max_iter).
RootResult bisect_decreasing(const std::function<double(double)>& f, double base, double tol = 1e-10,
                             std::size_t max_iter = 200);

}  // namespace nlds
