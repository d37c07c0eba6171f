#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlds/assembly.hpp"
#include "nlds/model.hpp"
#include "nlds/opspec.hpp"
#include "nlds/reduce.hpp"

namespace nlds {

/// H(x_a) = s(A_d(x_a)) and h(x_a) = s(F_eta(x_a)), where
/// F_lambda(x) = A11(x) + A12(x) (lambda I - A22(x))^{-1} A21(x) and eta = max_a H.
/// Evaluated in extended precision: near the maximum the resolvent amplifies
/// rounding in A11 by the size of d chi.
struct SpectralField {
  std::vector<double> x;
  std::vector<double> H;
  std::vector<double> h;
  double eta = 0.0;
};

SpectralField spectral_field(const SampledSystem& sampled);

/// Source of H values: H(grid, x) for x anywhere in the domain, with chi
/// computed by the grid's quadrature.
using FieldSource = std::function<double(const Grid&, double)>;

/// H(x) = s(A_d(x)) for a dispersal system.
FieldSource field_source(const DispersalSystem& sys);

enum class Verdict { Holds, Fails, Degenerate, Inconclusive };

struct IntegrabilityOptions {
  double floor = 1e-13;
  std::size_t window = 10;
  /// Growth ratio that counts as divergence.
  double ratio_threshold = 1.05;
};

struct IntegrabilityReport {
  std::vector<std::size_t> n;
  /// Refined sup of H on each grid.
  std::vector<double> eta;
  /// I_n = sum over region nodes with eta - H > floor of w / (eta - H).
  std::vector<double> integrals;
  /// integrals[k + 1] / integrals[k]
  std::vector<double> ratios;
  /// Least-squares slope of ln(eta - H) against ln|x - x_max| on the finest grid.
  double order = 0.0;
  double x_max = 0.0;
  std::size_t plateau_nodes = 0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Graded evidence for whether (eta - H)^{-1} fails to be integrable on
/// region: Holds when the ratios stay above the threshold or the fitted order
/// is at least 1, Fails when no ratio exceeds it and the order is below 1,
/// Degenerate when the maximum sits on a plateau of 3 or more nodes.
IntegrabilityReport integrability_diagnostic(const FieldSource& field, Interval domain,
                                             const std::vector<std::size_t>& grid_sizes, Interval region,
                                             const IntegrabilityOptions& opts = {});

std::string to_string(Verdict v);

/// s(T_lambda) - lambda for the l1-block operator
/// T_lambda = diag(F_lambda(x_a)) + d_i K_i (the -d_i chi_i part already sits in A11).
/// Throws DomainError unless lambda > max_a s(M22(x_a)).
double generalized_eigen_residual(const SampledSystem& sampled, double lambda, const SpectralOptions& opts = {});

enum class SweepMode { SmallD, LargeDNonDegen, LargeDDegen };

enum class Reference { Kappa, KappaTilde, GammaStar, Eta22 };

struct SweepRow {
  double t = 0.0;
  double s = 0.0;
  double s_e = 0.0;
  double gap = 0.0;
  double reference = 0.0;
  /// |s - reference|
  double deviation = 0.0;
  bool converged = false;
};

struct SweepTable {
  SweepMode mode = SweepMode::SmallD;
  Reference reference_kind = Reference::Kappa;
  std::vector<SweepRow> rows;
};

/// Scales all of d by t (SmallD) or the diffusing entries by t (LargeD modes)
/// and records s, s_e and the deviation from the mode's limit. Rows are sorted by t.
SweepTable sweep(const SampledSystem& sampled, std::vector<double> t_schedule,
                 SweepMode mode, const ReducedQuantities& reduced, const SpectralOptions& opts = {});

/// CSV with header t,s,s_e,gap,reference,deviation,converged and 17 significant digits.
void write_csv(std::ostream& out, const SweepTable& table);

std::string to_string(SweepMode m);
std::string to_string(Reference r);
std::optional<SweepMode> parse_sweep_mode(const std::string& text);

enum class ProbeMode { Random, DiagonalShift };

struct ProbeResult {
  double dM = 0.0;
  double dK = 0.0;
  double s_base = 0.0;
  double s_perturbed = 0.0;
  double ds = 0.0;
  /// max_i |(P' v)_i / v_i - s(P)| for the Perron vector v of P; bounds |ds|.
  double sandwich_bound = 0.0;
};

/// Random mode: off-diagonal m_ij += U[0, delta], diagonal += U[-delta, delta],
/// kernel samples += U[0, delta], drawn from a 64-bit Mersenne twister seeded
/// with seed. DiagonalShift mode: every diagonal entry += delta.
ProbeResult perturbation_probe(const SampledSystem& sampled, double delta, std::uint64_t seed,
                               ProbeMode mode = ProbeMode::Random, const SpectralOptions& opts = {});

}  // namespace nlds
