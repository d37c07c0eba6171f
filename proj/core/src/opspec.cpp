#include "nlds/opspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nlds/error.hpp"
#include "nlds/matspec.hpp"
#include "nlds/perron.hpp"

namespace nlds {

SpectralBound spectral_bound(const Eigen::MatrixXd& P, const SpectralOptions& opts) {
  PerronOptions po;
  po.tol = opts.tol;
  po.max_iter = opts.max_iter;
  auto r = metzler_perron<double>(P, po);
  SpectralBound out;
  out.s = r.root;
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.residual = r.residual;
  if (r.converged) out.eigvec = std::move(r.right);
  out.left = std::move(r.left);
  return out;
}

SpectralBound spectral_bound(const AssembledOperator& P, const SpectralOptions& opts) {
  return spectral_bound(P.matrix, opts);
}

double essential_bound(const PointwiseA& A, double tol) {
  if (A.matrices.empty()) throw DimensionError("essential_bound: no pointwise matrices");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : A.matrices) best = std::max(best, perron_bound(m, tol));
  return best;
}

double default_gap_tol(double s) { return 1e-6 * std::max(1.0, std::abs(s)); }

namespace {

Certificate certify(const Eigen::MatrixXd& P, const SpectralBound& sb, double s, double s_e, double gap_tol) {
  Certificate cert;
  cert.lambda = s;
  if (!(s - s_e > gap_tol)) {
    std::ostringstream msg;
    msg << "gap below tolerance (s - s_e = " << s - s_e << ", gap_tol = " << gap_tol << ")";
    cert.reason = msg.str();
    return cert;
  }
  if (!sb.converged || !sb.eigvec) {
    cert.reason = "power iteration did not converge in direction";
    return cert;
  }
  const Eigen::VectorXd& u = *sb.eigvec;
  cert.min_component = u.minCoeff() / u.cwiseAbs().maxCoeff();
  cert.residual = (P * u - s * u).cwiseAbs().maxCoeff() / u.cwiseAbs().maxCoeff();
  if (!(cert.min_component > 0.0)) {
    std::ostringstream msg;
    msg << "positive gap " << s - s_e << " but the converged Perron vector has min component "
        << cert.min_component << "; refine the grid";
    throw ConsistencyError(msg.str());
  }
  if (!(cert.residual <= 1e-8)) {
    std::ostringstream msg;
    msg << "eigen-residual " << cert.residual << " exceeds 1e-8";
    cert.reason = msg.str();
    return cert;
  }
  cert.exists = true;
  cert.eigvec = u;
  return cert;
}

}  // namespace

Certificate principal_certificate(const AssembledOperator& P, double s, double s_e, std::optional<double> gap_tol,
                                  const SpectralOptions& opts) {
  const double tol = gap_tol.value_or(default_gap_tol(s));
  if (!(s - s_e > tol)) return certify(P.matrix, SpectralBound{}, s, s_e, tol);
  return certify(P.matrix, spectral_bound(P, opts), s, s_e, tol);
}

SpectralReport spectral_report(const AssembledOperator& P, const PointwiseA& A, std::optional<double> gap_tol,
                               const SpectralOptions& opts) {
  const auto sb = spectral_bound(P, opts);
  SpectralReport r;
  r.s = sb.s;
  r.s_e = essential_bound(A, opts.tol);
  r.gap = r.s - r.s_e;
  r.gap_tol = gap_tol.value_or(default_gap_tol(r.s));
  r.converged = sb.converged;
  r.iterations = sb.iterations;
  r.residual = sb.residual;
  r.certificate = certify(P.matrix, sb, r.s, r.s_e, r.gap_tol);
  return r;
}

std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& P, std::size_t cap) {
  if (P.rows() != P.cols()) throw DimensionError("dense_spectrum: matrix is not square");
  if (static_cast<std::size_t>(P.rows()) > cap) {
    std::ostringstream msg;
    msg << "dense_spectrum refuses a " << P.rows() << "x" << P.cols() << " matrix (cap " << cap << ")";
    throw SizeLimitError(msg.str());
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(P, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense_spectrum: QR iteration failed", 0.0, {});
  std::vector<std::complex<double>> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return ev;
}

std::vector<std::complex<double>> dense_spectrum(const AssembledOperator& P, std::size_t cap) {
  return dense_spectrum(P.matrix, cap);
}

double growth_rate(const Eigen::MatrixXd& P, double T, const std::optional<Eigen::VectorXd>& u0,
                   const GrowthOptions& opts) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("growth_rate: horizon must be positive and finite");
  if (P.rows() != P.cols()) throw DimensionError("growth_rate: matrix is not square");
  const auto n = P.rows();
  Eigen::VectorXd u = u0.value_or(Eigen::VectorXd::Ones(n));
  if (u.size() != n) throw DimensionError("growth_rate: initial vector has the wrong length");

  const double c = positivity_shift(P);
  const double half = T / 2.0;
  const double dt_max = 1.0 / (2.0 * c * static_cast<double>(std::max<std::size_t>(opts.substeps, 1)));
  const int k = std::max(0, static_cast<int>(std::ceil(std::log2(half / dt_max))));
  const double dt = std::ldexp(half, -k);

  Eigen::MatrixXd S = dt * P;
  S.diagonal().array() += 1.0;
  double scale = S.cwiseAbs().maxCoeff();
  S /= scale;
  double log_scale = std::log(scale);
  Eigen::MatrixXd tmp(n, n);
  for (int j = 0; j < k; ++j) {
    tmp.noalias() = S * S;
    scale = tmp.cwiseAbs().maxCoeff();
    S = tmp / scale;
    log_scale = 2.0 * log_scale + std::log(scale);
  }

  Eigen::VectorXd v = S * u;
  const double nv = v.cwiseAbs().maxCoeff();
  const double nw = (S * (v / nv)).cwiseAbs().maxCoeff();
  return (log_scale + std::log(nw)) / half;
}

double growth_rate(const AssembledOperator& P, double T, const GrowthOptions& opts) {
  return growth_rate(P.matrix, T, std::nullopt, opts);
}

}  // namespace nlds
