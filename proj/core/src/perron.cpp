#include "nlds/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlds/error.hpp"

namespace nlds {

namespace {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

constexpr std::size_t kMaxSquarings = 128;

template <class Scalar>
void normalize(Vec<Scalar>& v) {
  const Scalar m = v.cwiseAbs().maxCoeff();
  if (m > Scalar(0) && std::isfinite(static_cast<double>(m))) v /= m;
}

template <class Scalar>
struct Estimate {
  Scalar root;
  Scalar residual;
};

// Two-sided Rayleigh quotient and the larger of the right and left relative residuals.
template <class Scalar>
Estimate<Scalar> estimate(const Vec<Scalar>& x, const Vec<Scalar>& y, const Vec<Scalar>& Px,
                          const Vec<Scalar>& Pty, Scalar shift) {
  using std::abs;
  const Scalar denom = y.dot(x);
  const Scalar scale = x.cwiseAbs().sum() * y.cwiseAbs().maxCoeff();
  Scalar root;
  if (denom > std::numeric_limits<Scalar>::epsilon() * scale) {
    root = y.dot(Px) / denom;
  } else {
    Eigen::Index i = 0;
    x.cwiseAbs().maxCoeff(&i);
    root = Px(i) / x(i);
  }
  const Scalar rho = std::max(root + shift, Scalar(1));
  const Scalar xn = x.cwiseAbs().maxCoeff();
  const Scalar yn = y.cwiseAbs().maxCoeff();
  const Scalar rx = (Px - root * x).cwiseAbs().maxCoeff() / (rho * xn);
  const Scalar ry = (Pty - root * y).cwiseAbs().maxCoeff() / (rho * yn);
  return {root, std::max(rx, ry)};
}

}  // namespace

template <class Scalar>
PerronResult<Scalar> metzler_perron(const Mat<Scalar>& P, const PerronOptions& opts) {
  if (P.rows() != P.cols() || P.rows() == 0) throw DimensionError("metzler_perron: need a non-empty square matrix");
  if (!P.allFinite()) throw DomainError("metzler_perron: matrix has non-finite entries");

  const Eigen::Index n = P.rows();
  const Scalar tol = static_cast<Scalar>(opts.tol);
  PerronResult<Scalar> out;

  if (n == 1) {
    out.root = P(0, 0);
    out.right = Vec<Scalar>::Ones(1);
    out.left = Vec<Scalar>::Ones(1);
    out.converged = true;
    out.cw_lower = out.cw_upper = out.root;
    out.positive = true;
    return out;
  }

  const Scalar c = positivity_shift(P);
  Mat<Scalar> B = P;
  B.diagonal().array() += c;

  Vec<Scalar> x = Vec<Scalar>::Ones(n);
  Vec<Scalar> y = Vec<Scalar>::Ones(n);
  Estimate<Scalar> est{0, std::numeric_limits<Scalar>::infinity()};

  const std::size_t plain_cap = opts.accelerate ? std::min(opts.plain_steps, opts.max_iter) : opts.max_iter;
  while (out.iterations < plain_cap) {
    Vec<Scalar> bx = B * x;
    Vec<Scalar> by = B.transpose() * y;
    ++out.iterations;
    est = estimate<Scalar>(x, y, bx - c * x, by - c * y, c);
    if (est.residual <= tol) {
      out.converged = true;
      break;
    }
    x = std::move(bx);
    y = std::move(by);
    normalize(x);
    normalize(y);
  }

  if (!out.converged && opts.accelerate) {
    Mat<Scalar> S = B / B.maxCoeff();
    Mat<Scalar> tmp(n, n);
    const Vec<Scalar> x0 = x;
    const Vec<Scalar> y0 = y;
    const Scalar settled = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
    while (out.iterations < opts.max_iter && out.squarings < kMaxSquarings) {
      tmp.noalias() = S * S;
      const Scalar m = tmp.maxCoeff();
      if (!(m > Scalar(0))) break;
      tmp /= m;
      // Once S stops changing it is the spectral projector; more squarings cannot help.
      const Scalar change = (tmp - S).cwiseAbs().maxCoeff();
      S.swap(tmp);
      ++out.squarings;
      ++out.iterations;

      x = S * x0;
      y = S.transpose() * y0;
      normalize(x);
      normalize(y);
      est = estimate<Scalar>(x, y, P * x, P.transpose() * y, c);
      if (est.residual <= tol) {
        out.converged = true;
        break;
      }
      if (change <= settled) break;
    }

    // Polish against the nearly rank-one S while the residual keeps dropping.
    for (int k = 0; k < 4 && out.iterations < opts.max_iter; ++k) {
      Vec<Scalar> nx = S * x;
      Vec<Scalar> ny = S.transpose() * y;
      normalize(nx);
      normalize(ny);
      ++out.iterations;
      const auto next = estimate<Scalar>(nx, ny, P * nx, P.transpose() * ny, c);
      if (!(next.residual < est.residual)) break;
      x = std::move(nx);
      y = std::move(ny);
      est = next;
      if (est.residual <= tol) out.converged = true;
    }
  }

  normalize(x);
  normalize(y);
  const Vec<Scalar> Px = P * x;
  est = estimate<Scalar>(x, y, Px, P.transpose() * y, c);
  out.root = est.root;
  out.residual = est.residual;
  if (est.residual <= tol) out.converged = true;
  out.right = std::move(x);
  out.left = std::move(y);
  out.positive = out.right.minCoeff() > Scalar(0);
  if (out.positive) {
    const Vec<Scalar> ratio = Px.cwiseQuotient(out.right);
    out.cw_lower = ratio.minCoeff();
    out.cw_upper = ratio.maxCoeff();
  } else {
    out.cw_lower = -std::numeric_limits<Scalar>::infinity();
    out.cw_upper = std::numeric_limits<Scalar>::infinity();
  }
  return out;
}

template PerronResult<double> metzler_perron<double>(const Eigen::MatrixXd&, const PerronOptions&);
template PerronResult<long double> metzler_perron<long double>(const Mat<long double>&,
                                                               const PerronOptions&);

}  // namespace nlds
