#include "nlds/matspec.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlds/error.hpp"
#include "nlds/perron.hpp"

namespace nlds {

namespace {

void check_split(std::size_t l, std::size_t l1) {
  if (l1 == 0 || l1 > l) {
    std::ostringstream msg;
    msg << "split l1 = " << l1 << " out of range for order " << l;
    throw DimensionError(msg.str());
  }
}

}  // namespace

CoopMatrix::CoopMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw DimensionError("CoopMatrix: need a non-empty square matrix");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (i != j && !(m_(i, j) >= 0.0)) {
        std::ostringstream msg;
        msg << "matrix is not cooperative: entry (" << i << ", " << j << ") = " << m_(i, j);
        throw DomainError(msg.str());
      }
    }
  }
}

CoopMatrix CoopMatrix::block11(std::size_t l1) const {
  check_split(order(), l1);
  const auto k = static_cast<Eigen::Index>(l1);
  return CoopMatrix(m_.topLeftCorner(k, k));
}

CoopMatrix CoopMatrix::block22(std::size_t l1) const {
  check_split(order(), l1);
  if (l1 == order()) throw DimensionError("block22: empty trailing block");
  const auto k = static_cast<Eigen::Index>(order() - l1);
  return CoopMatrix(m_.bottomRightCorner(k, k));
}

double perron_bound(const Eigen::MatrixXd& C, double tol) {
  if (!(tol > 0.0)) throw DomainError("perron_bound: tol must be positive");
  PerronOptions opts;
  opts.tol = tol;
  const auto r = metzler_perron<double>(C, opts);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "perron_bound did not converge after " << r.iterations << " iterations (residual "
        << r.residual << ")";
    throw ConvergenceError(msg.str(), r.root, std::vector<double>(r.right.begin(), r.right.end()));
  }
  return r.root;
}

double perron_bound(const CoopMatrix& C, double tol) { return perron_bound(C.matrix(), tol); }

bool is_irreducible(const Eigen::MatrixXd& C, double tol_zero) {
  const auto l = C.rows();
  if (l <= 1) return true;
  // Strongly connected iff vertex 0 reaches everything forward and backward.
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(l), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < l; ++j) {
        if (j == i || seen[static_cast<std::size_t>(j)]) continue;
        const double entry = transpose ? C(j, i) : C(i, j);
        if (entry > tol_zero) {
          seen[static_cast<std::size_t>(j)] = 1;
          stack.push_back(j);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  return reaches_all(false) && reaches_all(true);
}

bool is_irreducible(const CoopMatrix& C, double tol_zero) { return is_irreducible(C.matrix(), tol_zero); }

SchurResult schur_reduce_unchecked(const Eigen::MatrixXd& C, std::size_t l1, double gamma) {
  const std::size_t l = static_cast<std::size_t>(C.rows());
  check_split(l, l1);
  const auto k1 = static_cast<Eigen::Index>(l1);
  const auto k2 = static_cast<Eigen::Index>(l - l1);
  if (k2 == 0) return {CoopMatrix(C), 1.0, false};

  Eigen::MatrixXd R = -C.bottomRightCorner(k2, k2);
  R.diagonal().array() += gamma;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(R);
  const double rcond = lu.rcond();
  Eigen::MatrixXd reduced = C.topLeftCorner(k1, k1) + C.topRightCorner(k1, k2) * lu.solve(C.bottomLeftCorner(k2, k1));

  // The exact result is cooperative; clear rounding-level negatives off the diagonal.
  const double scale = std::max(1.0, reduced.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < k1; ++i) {
    for (Eigen::Index j = 0; j < k1; ++j) {
      if (i == j || reduced(i, j) >= 0.0) continue;
      if (reduced(i, j) > -1e-12 * scale) {
        reduced(i, j) = 0.0;
      } else {
        std::ostringstream msg;
        msg << "schur_reduce: reduced entry (" << i << ", " << j << ") = " << reduced(i, j)
            << " is negative; gamma may not exceed s(C22)";
        throw ConsistencyError(msg.str());
      }
    }
  }
  return {CoopMatrix(std::move(reduced)), rcond, !(rcond * 1e14 > 1.0)};
}

SchurResult schur_reduce(const CoopMatrix& C, std::size_t l1, double gamma) {
  check_split(C.order(), l1);
  if (l1 < C.order()) {
    const double s22 = perron_bound(C.block22(l1));
    if (!(gamma > s22)) {
      std::ostringstream msg;
      msg << "schur_reduce: gamma = " << gamma << " must exceed s(C22) = " << s22;
      throw DomainError(msg.str());
    }
  }
  return schur_reduce_unchecked(C.matrix(), l1, gamma);
}

std::vector<double> large_shift_limit_check(const CoopMatrix& C, std::size_t l1,
                                            std::span<const double> mu_schedule) {
  check_split(C.order(), l1);
  std::vector<double> out;
  out.reserve(mu_schedule.size());
  for (double mu : mu_schedule) {
    Eigen::MatrixXd shifted = C.matrix();
    for (std::size_t i = 0; i < l1; ++i) shifted(i, i) -= mu;
    out.push_back(perron_bound(shifted));
  }
  return out;
}

}  // namespace nlds
