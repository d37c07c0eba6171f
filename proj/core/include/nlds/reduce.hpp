#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlds/matspec.hpp"
#include "nlds/model.hpp"
#include "nlds/search.hpp"

namespace nlds {

/// Stationary dispersal profile p of one kernel: sum_b k(x_a, x_b) w_b p_b = chi(x_a) p_a,
/// normalized to sum_a p_a w_a = 1.
struct PerronWeight {
  std::vector<double> p;
  double eigenvalue = 1.0;
  /// |eigenvalue - 1|
  double deviation = 0.0;
  /// ||K p - chi p||_inf with K(a, b) = k(x_a, x_b) w_b.
  double residual = 0.0;
  std::size_t iterations = 0;
  /// Uniform 1 / (b - a) used because the species has no kernel.
  bool uniform = false;
};

/// Throws ConsistencyError (advising refinement) when |eigenvalue - 1| > 100 tol.
PerronWeight perron_weight(const Eigen::MatrixXd& kernel_values, const Grid& grid, double tol = 1e-12);
PerronWeight perron_weight(const KernelSpec& kernel, const Grid& grid, double tol = 1e-12);

PerronWeight uniform_weight(const Grid& grid);

/// One weight per species; species without a kernel get the uniform fallback.
struct PerronWeights {
  std::vector<PerronWeight> species;

  bool uses_fallback() const;
};

PerronWeights perron_weights(const SampledSystem& sampled, double tol = 1e-12);

/// tilde m_ij = sum_a m_ij(x_a) p_j(x_a) w_a
CoopMatrix reduced_tilde_M(const SampledSystem& sampled, const PerronWeights& weights);

struct KappaEta {
  /// max_a s(M(x_a))
  double kappa = 0.0;
  /// max_a s(M22(x_a)); empty when l2 = 0.
  std::optional<double> eta22;
};

KappaEta kappa_and_eta22(const SampledSystem& sampled);

/// sup over the closed domain of s(M22(x)), refined between nodes.
SupEstimate eta22_supremum(const DispersalSystem& sys, const Grid& grid);

struct TildeB {
  CoopMatrix matrix;
  /// gamma within 1e-12 of s(M22(x_a)) at some node.
  bool near_singular = false;
  bool ill_conditioned = false;
};

/// B~_gamma with b_gamma(x_a) = M11 + M12 (gamma - M22)^{-1} M21 (built from
/// M11, not from A11) and b~_ij = sum_a b_ij(x_a) p_j(x_a) w_a. Throws
/// DomainError when gamma <= max_a s(M22(x_a)).
TildeB tilde_B(const SampledSystem& sampled, const PerronWeights& weights, double gamma);

struct ThresholdOptions {
  /// Margin above eta22 the ladder limit must clear for Case A; default 1e-4 max(1, |eta22|).
  std::optional<double> margin;
  double bisection_tol = 1e-10;
  std::size_t max_iter = 200;
};

struct Threshold {
  enum class Case { A, B };
  Case kind = Case::B;
  /// gamma* in Case A, eta22 in Case B.
  double value = 0.0;
  /// Threshold the ladder started from (sup estimate of eta22).
  double eta22 = 0.0;
  double margin = 0.0;
  std::vector<std::pair<double, double>> ladder;
  /// |s(B~_{gamma*}) - gamma*| in Case A.
  double fixed_point_residual = 0.0;
  std::size_t iterations = 0;
};

/// Large-diffusion dichotomy for partially degenerate systems: Case A with the
/// unique root of s(B~_gamma) = gamma, or Case B with limit eta22.
Threshold classify_threshold(const DispersalSystem& sys, const SampledSystem& sampled,
                             const PerronWeights& weights, const ThresholdOptions& opts = {});

struct ReducedQuantities {
  PerronWeights weights;
  CoopMatrix tilde_M;
  double kappa = 0.0;
  double kappa_tilde = 0.0;
  std::optional<double> eta22;
  std::optional<double> eta22_sup;
  std::optional<Threshold> threshold;
};

/// Everything above for one grid. The threshold is classified when l2 > 0.
ReducedQuantities reduce(const DispersalSystem& sys, const SampledSystem& sampled, double tol = 1e-12,
                         const ThresholdOptions& opts = {});

std::string to_string(Threshold::Case c);

}  // namespace nlds
