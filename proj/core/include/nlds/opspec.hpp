#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlds/assembly.hpp"

namespace nlds {

inline constexpr std::size_t kDenseSpectrumCap = 600;

struct SpectralOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
};

struct SpectralBound {
  double s = 0.0;
  /// Right Perron vector (unit max norm), present when the direction converged.
  std::optional<Eigen::VectorXd> eigvec;
  Eigen::VectorXd left;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// s(P) for a Metzler matrix. Never throws on non-convergence; the result is flagged instead.
SpectralBound spectral_bound(const Eigen::MatrixXd& P, const SpectralOptions& opts = {});
SpectralBound spectral_bound(const AssembledOperator& P, const SpectralOptions& opts = {});

/// max_a s(A_d(x_a)).
double essential_bound(const PointwiseA& A, double tol = 1e-12);

struct Certificate {
  bool exists = false;
  double lambda = 0.0;
  Eigen::VectorXd eigvec;
  /// ||P u - lambda u||_inf / ||u||_inf.
  double residual = 0.0;
  double min_component = 0.0;
  std::string reason;
};

/// Default gap tolerance 1e-6 max(1, |s|).
double default_gap_tol(double s);

/// Exists(lambda = s, u) when s - s_e exceeds gap_tol and the Perron vector is
/// strictly positive with residual at most 1e-8 ||u||; NoCertificate when the
/// gap is too small. A positive gap with a sign-changing vector throws
/// ConsistencyError.
Certificate principal_certificate(const AssembledOperator& P, double s, double s_e,
                                  std::optional<double> gap_tol = std::nullopt,
                                  const SpectralOptions& opts = {});

/// All eigenvalues by Hessenberg reduction and shifted QR, sorted by real part
/// descending (ties by imaginary part descending). Refuses matrices above the cap.
std::vector<std::complex<double>> dense_spectrum(const Eigen::MatrixXd& P, std::size_t cap = kDenseSpectrumCap);
std::vector<std::complex<double>> dense_spectrum(const AssembledOperator& P, std::size_t cap = kDenseSpectrumCap);

struct GrowthOptions {
  /// Euler step is 1 / (2 c substeps), rounded down so that T/2 is a power-of-two multiple of it.
  std::size_t substeps = 1024;
};

/// (ln||u(T)|| - ln||u(T/2)||) / (T/2) for explicit Euler on u' = P u,
/// u(0) = u0 (ones by default). The power (I + dt P)^N is formed by repeated
/// squaring with the log scale tracked separately.
double growth_rate(const Eigen::MatrixXd& P, double T, const std::optional<Eigen::VectorXd>& u0 = std::nullopt,
                   const GrowthOptions& opts = {});
double growth_rate(const AssembledOperator& P, double T, const GrowthOptions& opts = {});

struct SpectralReport {
  double s = 0.0;
  double s_e = 0.0;
  double gap = 0.0;
  double gap_tol = 0.0;
  Certificate certificate;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

SpectralReport spectral_report(const AssembledOperator& P, const PointwiseA& A,
                               std::optional<double> gap_tol = std::nullopt, const SpectralOptions& opts = {});

}  // namespace nlds
