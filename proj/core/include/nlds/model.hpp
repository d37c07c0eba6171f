#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlds/expr.hpp"
#include "nlds/grid.hpp"

namespace nlds {

struct Interval {
  double a = -1.0;
  double b = 1.0;
};

/// Dispersal kernel k(x, y); x is the receiving point, y the source.
struct KernelSpec {
  Expr expr;
};

/// Coefficient field M(x), stored row-major.
struct CoefField {
  std::size_t l = 0;
  std::vector<Expr> entries;

  const Expr& at(std::size_t i, std::size_t j) const { return entries.at(i * l + j); }
};

/// The continuum problem. Diffusing species come first: kernels[i] belongs to
/// species i for i < l1, and species l1..l-1 never disperse.
struct DispersalSystem {
  std::size_t l = 0;
  std::size_t l1 = 0;
  std::vector<double> d;
  std::vector<KernelSpec> kernels;
  CoefField coefficients;
  Interval domain;

  std::size_t l2() const noexcept { return l - l1; }

  /// Throws DimensionError when the counts of d, kernels and entries disagree with l and l1.
  void check_shape() const;

  DispersalSystem with_d(std::vector<double> new_d) const;
};

/// All expressions evaluated once on a grid.
struct SampledSystem {
  Grid grid{0.0, 1.0, 1};
  std::size_t l = 0;
  std::size_t l1 = 0;
  std::vector<double> d;
  /// kernels[i](a, b) = k_i(x_a, x_b)
  std::vector<Eigen::MatrixXd> kernels;
  /// coefficients[a] = M(x_a)
  std::vector<Eigen::MatrixXd> coefficients;

  std::size_t n() const noexcept { return grid.size(); }
  std::size_t l2() const noexcept { return l - l1; }
};

SampledSystem sample(const DispersalSystem& sys, const Grid& grid);

/// M(x) at an arbitrary point of the domain.
Eigen::MatrixXd coefficients_at(const DispersalSystem& sys, double x);

enum class Hypothesis { H1, H2, H3, H4, KernelSign };

enum class Mode { NonDegenerate, PartiallyDegenerate };

struct Violation {
  Hypothesis hypothesis;
  std::size_t node = 0;
  /// Matrix entry for H1, (species, species) for H3, (a, b) node pair for KernelSign.
  std::size_t row = 0;
  std::size_t col = 0;
  std::optional<std::size_t> species;
  double value = 0.0;
  /// Non-blocking entries are caveats: the spectral machinery still runs.
  bool blocking = true;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Empty when d fits neither the H4 nor the H4' pattern (e.g. the d = 0 limit).
  std::optional<Mode> mode;

  bool passed() const;
  bool holds(Hypothesis h) const;
  /// Nodes where M(x_a) is reducible.
  std::vector<std::size_t> reducible_nodes() const;
};

/// Checks H1-H3 at every node (H3 and kernel sign at every node pair) and
/// classifies the diffusion pattern. H2 failing at some but not all nodes is a
/// caveat; failing everywhere blocks.
ValidationReport validate(const SampledSystem& sampled);
ValidationReport validate(const DispersalSystem& sys, const Grid& grid);

std::string to_string(Hypothesis h);
std::string to_string(Mode m);

}  // namespace nlds
