#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlds {

inline constexpr double kTolZero = 1e-13;

/// Square matrix with nonnegative off-diagonal entries.
class CoopMatrix {
 public:
  /// Throws DomainError if an off-diagonal entry is negative, DimensionError if not square.
  explicit CoopMatrix(Eigen::MatrixXd m);

  std::size_t order() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// Leading and trailing principal blocks for a split after row l1.
  CoopMatrix block11(std::size_t l1) const;
  CoopMatrix block22(std::size_t l1) const;

 private:
  Eigen::MatrixXd m_;
};

/// s(C), the rightmost (real) eigenvalue. Throws ConvergenceError with the
/// last iterate after the iteration cap.
double perron_bound(const CoopMatrix& C, double tol = 1e-12);
double perron_bound(const Eigen::MatrixXd& C, double tol = 1e-12);

/// Strong connectivity of the graph with an edge i -> j whenever i != j and C_ij > tol_zero.
bool is_irreducible(const Eigen::MatrixXd& C, double tol_zero = kTolZero);
bool is_irreducible(const CoopMatrix& C, double tol_zero = kTolZero);

struct SchurResult {
  CoopMatrix matrix;
  /// Reciprocal condition estimate of gamma I - C22 (1 when l2 = 0).
  double rcond = 1.0;
  /// Set when 1 / rcond exceeds 1e14.
  bool ill_conditioned = false;
};

/// C11 + C12 (gamma I - C22)^{-1} C21. Throws DomainError unless gamma > s(C22).
SchurResult schur_reduce(const CoopMatrix& C, std::size_t l1, double gamma);

/// Same reduction without the s(C22) check; callers that already know gamma
/// exceeds s(C22) at every node use this inside tight loops.
SchurResult schur_reduce_unchecked(const Eigen::MatrixXd& C, std::size_t l1, double gamma);

/// s(C - diag(mu, .., mu, 0, .., 0)) for each mu, with mu on the first l1 entries.
std::vector<double> large_shift_limit_check(const CoopMatrix& C, std::size_t l1,
                                            std::span<const double> mu_schedule);

}  // namespace nlds
