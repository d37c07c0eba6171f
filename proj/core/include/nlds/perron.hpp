#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace nlds {

struct PerronOptions {
  /// Relative residual ||P x - s x||_inf / (rho ||x||_inf) that counts as converged.
  double tol = 1e-12;
  /// Cap on matrix applications (a matvec or a squaring each count once).
  std::size_t max_iter = 100000;
  /// Plain power steps tried before switching to repeated squaring.
  std::size_t plain_steps = 64;
  bool accelerate = true;
};

template <class Scalar>
struct PerronResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Spectral bound s(P).
  Scalar root = 0;
  /// Right and left Perron vectors, normalized to unit max norm.
  Vector right;
  Vector left;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t squarings = 0;
  Scalar residual = 0;
  /// Collatz-Wielandt bracket min/max (P x)_i / x_i; only meaningful when x > 0.
  Scalar cw_lower = 0;
  Scalar cw_upper = 0;
  bool positive = false;
};

/// Spectral bound of a Metzler matrix P via the nonnegative matrix P + cI,
/// c = 1 + max(0, -min diag).
///
/// Power iteration runs on the right and left vectors. If it stalls (ratio of
/// the two leading eigenvalues of P + cI close to one, as happens for large
/// diffusion), the normalized matrix is squared repeatedly, which raises the
/// effective iteration count to 2^k. Squaring nonnegative matrices involves no
/// cancellation, so accuracy survives. The returned root is the two-sided
/// Rayleigh quotient y^T P x / y^T x.
template <class Scalar>
PerronResult<Scalar> metzler_perron(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& P,
                                    const PerronOptions& opts = {});

extern template PerronResult<double> metzler_perron<double>(const Eigen::MatrixXd&,
                                                            const PerronOptions&);
extern template PerronResult<long double> metzler_perron<long double>(
    const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>&, const PerronOptions&);

/// c = 1 + max(0, -min diag P).
template <class Derived>
typename Derived::Scalar positivity_shift(const Eigen::MatrixBase<Derived>& P) {
  using Scalar = typename Derived::Scalar;
  const Scalar min_diag = P.diagonal().minCoeff();
  return Scalar(1) + (min_diag < Scalar(0) ? -min_diag : Scalar(0));
}

}  // namespace nlds
