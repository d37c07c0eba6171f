#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlds/model.hpp"
#include "nlds/reduce.hpp"

namespace nlds {

/// Linearized virus / infected-cell model at the infection-free state. Only
/// the virus disperses.
struct VSIParams {
  KernelSpec kernel;
  double d = 0.0;
  /// Virion production.
  Expr r = Expr::constant(1.0);
  /// Virion clearance.
  Expr m = Expr::constant(1.0);
  /// Infected-cell death.
  Expr b = Expr::constant(1.0);
  /// Cell-to-cell transmission derivative.
  Expr beta_d = Expr::constant(1.0);
  /// Cell-free transmission derivative.
  Expr beta_i = Expr::constant(1.0);
  Interval domain;
};

struct SampledVSI {
  Grid grid{0.0, 1.0, 1};
  double d = 0.0;
  Eigen::MatrixXd kernel;
  Eigen::VectorXd r, m, b, beta_d, beta_i;
  /// beta_i vanishes somewhere: accepted, but the model leaves its standing assumptions.
  bool outside_assumptions = false;
};

/// Throws DomainError unless r, m, b, beta_d > 0 and beta_i >= 0 at every node, and d >= 0.
SampledVSI sample(const VSIParams& params, const Grid& grid);

struct EpidemicOperators {
  /// [[L - diag m, diag r], [0, -diag b]] with L = d (K - diag chi).
  Eigen::MatrixXd B;
  /// [[0, 0], [diag beta_i, diag beta_d]]
  Eigen::MatrixXd F;
};

EpidemicOperators assemble_epidemic(const SampledVSI& v);

struct R0Result {
  double r0 = 0.0;
  /// s(B), negative for valid parameters.
  double s_B = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Spectral radius of -F B^{-1}. The block structure of B reduces it to the
/// Perron root of diag(beta_d / b) + diag(beta_i) (m - L)^{-1} diag(r / b),
/// formed with one LU factorization. Throws DomainError when s(B) >= 0 and
/// ConvergenceError on non-convergence.
R0Result r0(const SampledVSI& v, double tol = 1e-10);

/// s(B + F / mu)
double H_mu(const SampledVSI& v, double mu);

/// sum_a [-m + r beta_i / (mu b - beta_d)] p w; throws DomainError when mu <= max_a beta_d / b.
double q_of_mu(const SampledVSI& v, const PerronWeight& weight, double mu);

/// max_a beta_d(x_a) / b(x_a)
double hat_r0(const SampledVSI& v);

/// max_a (beta_d / b + beta_i r / (b m)), the small-diffusion limit of R0.
double r0_small_d_limit(const SampledVSI& v);

struct R0Limit {
  enum class Case { Root, Boundary };
  Case kind = Case::Boundary;
  /// tilde R0 in the root case, hat R0 (sup estimate) otherwise.
  double value = 0.0;
  double hat_r0 = 0.0;
  double hat_r0_sup = 0.0;
  std::optional<double> tilde_r0;
  double margin = 0.0;
  std::vector<std::pair<double, double>> ladder;
  double r0_zero = 0.0;
  std::size_t iterations = 0;
};

struct LimitOptions {
  double bisection_tol = 1e-10;
  std::size_t max_iter = 200;
};

/// Large-diffusion limit of R0 by the same epsilon-ladder policy as the
/// threshold classification: Q sampled at hat R0 + eps decides between a root
/// of Q (root case) and the boundary value hat R0.
R0Limit r0_large_d_limit(const VSIParams& params, const SampledVSI& v, const PerronWeight& weight,
                         const LimitOptions& opts = {});

struct R0Report {
  R0Result r0;
  R0Limit limit;
  /// (mu, Q(mu)) samples: the ladder plus a coarse sweep above it.
  std::vector<std::pair<double, double>> q_samples;
  double h_at_r0 = 0.0;
  bool outside_assumptions = false;
};

R0Report r0_report(const VSIParams& params, const Grid& grid, double tol = 1e-10);

std::string to_string(R0Limit::Case c);

}  // namespace nlds
