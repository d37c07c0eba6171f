#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nlds/grid.hpp"
#include "nlds/model.hpp"

namespace nlds {

/// Quadrature discretization of P(d): an (l n) x (l n) Metzler matrix whose
/// (i, j) block of size n x n is
///
///     i == j:  d_i (K_i - diag chi_i) + diag(m_ii)
///     i != j:  diag(m_ij)
///
/// with K_i(a, b) = k_i(x_a, x_b) w_b.
struct AssembledOperator {
  std::size_t l = 0;
  std::size_t l1 = 0;
  std::size_t n = 0;
  Eigen::MatrixXd matrix;
  /// chi[i][a] = chi_i(x_a); zero for species without a kernel.
  std::vector<std::vector<double>> chi;
  std::vector<double> d;
  Grid grid{0.0, 1.0, 1};

  std::size_t size() const noexcept { return l * n; }

  auto block(std::size_t i, std::size_t j) const {
    const auto ni = static_cast<Eigen::Index>(n);
    return matrix.block(static_cast<Eigen::Index>(i) * ni, static_cast<Eigen::Index>(j) * ni, ni, ni);
  }
};

/// A_d(x_a) = M(x_a) - diag(d_1 chi_1(x_a), .., d_l1 chi_l1(x_a), 0, .., 0).
struct PointwiseA {
  std::vector<Eigen::MatrixXd> matrices;
};

/// chi(x_a) = sum_b k(x_b, x_a) w_b; the first kernel argument is the integration variable.
std::vector<double> compute_chi(const KernelSpec& kernel, const Grid& grid);
std::vector<double> compute_chi(const Eigen::MatrixXd& kernel_values, const Grid& grid);

/// chi at an arbitrary point, by the same quadrature.
double chi_at(const KernelSpec& kernel, const Grid& grid, double x);

struct AssembleOptions {
  /// Skip the validation gate.
  bool force = false;
};

/// Validates (unless forced) and assembles. Throws ValidationError listing the
/// blocking violations.
AssembledOperator assemble_operator(const DispersalSystem& sys, const Grid& grid, AssembleOptions opts = {});

/// Assembles from samples without validation.
AssembledOperator assemble(const SampledSystem& sampled);

/// d_i (K_i - diag chi_i) for one kernel sample matrix.
Eigen::MatrixXd dispersal_block(const Eigen::MatrixXd& kernel_values, const Grid& grid, double d);

PointwiseA pointwise_A(const DispersalSystem& sys, const Grid& grid);
PointwiseA pointwise_A(const SampledSystem& sampled);

/// Two little-endian u64 dimensions (rows, cols) followed by row-major little-endian f64 data.
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(std::istream& in);

}  // namespace nlds
