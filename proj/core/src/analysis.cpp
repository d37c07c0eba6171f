#include "nlds/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "nlds/error.hpp"
#include "nlds/perron.hpp"
#include "nlds/search.hpp"

namespace nlds {

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

PerronOptions extended_opts() {
  PerronOptions o;
  o.tol = 1e-17;
  return o;
}

long double extended_bound(const LMat& A) {
  const auto r = metzler_perron<long double>(A, extended_opts());
  return r.root;
}

// A_d(x) in extended precision from double samples.
LMat pointwise_extended(const Eigen::MatrixXd& M, const std::vector<double>& d, const std::vector<double>& chi_at_x,
                        std::size_t l1) {
  LMat A = M.cast<long double>();
  for (std::size_t i = 0; i < l1; ++i)
    A(i, i) -= static_cast<long double>(d[i]) * static_cast<long double>(chi_at_x[i]);
  return A;
}

// s(F_lambda) for one node; lambda must exceed s(A22).
long double reduced_bound(const LMat& A, std::size_t l1, long double lambda) {
  const auto k1 = static_cast<Eigen::Index>(l1);
  const auto k2 = A.rows() - k1;
  LMat R = -A.bottomRightCorner(k2, k2);
  R.diagonal().array() += lambda;
  LMat F = A.topLeftCorner(k1, k1) + A.topRightCorner(k1, k2) * R.partialPivLu().solve(A.bottomLeftCorner(k2, k1));
  for (Eigen::Index i = 0; i < k1; ++i)
    for (Eigen::Index j = 0; j < k1; ++j)
      if (i != j && F(i, j) < 0) F(i, j) = 0;
  return extended_bound(F);
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SpectralField spectral_field(const SampledSystem& s) {
  std::vector<std::vector<double>> chi(s.l1);
  for (std::size_t i = 0; i < s.l1; ++i) chi[i] = compute_chi(s.kernels[i], s.grid);

  const std::size_t n = s.n();
  std::vector<LMat> A(n);
  std::vector<long double> H(n);
  std::vector<double> chi_x(s.l1);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < s.l1; ++i) chi_x[i] = chi[i][a];
    A[a] = pointwise_extended(s.coefficients[a], s.d, chi_x, s.l1);
    H[a] = extended_bound(A[a]);
  }
  const long double eta = *std::max_element(H.begin(), H.end());

  SpectralField out;
  out.x = s.grid.points();
  out.eta = static_cast<double>(eta);
  out.H.resize(n);
  out.h.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    out.H[a] = static_cast<double>(H[a]);
    if (s.l2() == 0 || s.l1 == 0) {
      out.h[a] = out.H[a];
      continue;
    }
    const auto k2 = static_cast<Eigen::Index>(s.l2());
    const long double s22 = extended_bound(A[a].bottomRightCorner(k2, k2));
    // At a reducible node H may coincide with s(A22); F_eta is then the limit value eta.
    out.h[a] = eta > s22 ? static_cast<double>(reduced_bound(A[a], s.l1, eta)) : out.eta;
  }
  return out;
}

FieldSource field_source(const DispersalSystem& sys) {
  return [sys](const Grid& grid, double x) {
    std::vector<double> chi_x(sys.l1);
    for (std::size_t i = 0; i < sys.l1; ++i) chi_x[i] = chi_at(sys.kernels[i], grid, x);
    return static_cast<double>(extended_bound(pointwise_extended(coefficients_at(sys, x), sys.d, chi_x, sys.l1)));
  };
}

IntegrabilityReport integrability_diagnostic(const FieldSource& field, Interval domain,
                                             const std::vector<std::size_t>& grid_sizes, Interval region,
                                             const IntegrabilityOptions& opts) {
  if (grid_sizes.empty()) throw DomainError("integrability_diagnostic: need at least one grid");
  if (!(region.a < region.b) || region.a < domain.a || region.b > domain.b)
    throw DomainError("integrability_diagnostic: region must be a subinterval of the domain");

  IntegrabilityReport rep;
  std::vector<double> H;
  Grid finest = build_grid(domain.a, domain.b, grid_sizes.front());
  double eta_finest = 0.0;
  for (std::size_t n : grid_sizes) {
    const Grid grid = build_grid(domain.a, domain.b, n);
    auto f = [&](double x) { return field(grid, x); };
    const auto sup = refine_sup(f, grid);
    H.resize(n);
    for (std::size_t a = 0; a < n; ++a) H[a] = f(grid.point(a));

    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double x = grid.point(a);
      const double gap = sup.value - H[a];
      if (x >= region.a && x <= region.b && gap > opts.floor) sum += grid.weight(a) / gap;
    }
    rep.n.push_back(n);
    rep.eta.push_back(sup.value);
    rep.integrals.push_back(sum);
    if (rep.integrals.size() > 1) rep.ratios.push_back(sum / rep.integrals[rep.integrals.size() - 2]);
    finest = grid;
    eta_finest = sup.value;
    rep.x_max = sup.argmax;
  }

  // Local order from the finest grid.
  struct Pt {
    double dist;
    double gap;
  };
  std::vector<Pt> pts;
  for (std::size_t a = 0; a < finest.size(); ++a) {
    const double x = finest.point(a);
    const double gap = eta_finest - H[a];
    if (x < region.a || x > region.b) continue;
    if (gap <= opts.floor) {
      ++rep.plateau_nodes;
      continue;
    }
    const double dist = std::abs(x - rep.x_max);
    if (dist > 0.0) pts.push_back({dist, gap});
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& p, const Pt& q) { return p.dist < q.dist; });
  if (pts.size() > opts.window) pts.resize(opts.window);
  if (pts.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
      mx += std::log(p.dist);
      my += std::log(p.gap);
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : pts) {
      const double dx = std::log(p.dist) - mx;
      sxy += dx * (std::log(p.gap) - my);
      sxx += dx * dx;
    }
    rep.order = sxx > 0.0 ? sxy / sxx : 0.0;
  }

  const bool all_grow = !rep.ratios.empty() && std::all_of(rep.ratios.begin(), rep.ratios.end(), [&](double r) {
    return r > opts.ratio_threshold;
  });
  const bool none_grow = !rep.ratios.empty() && std::none_of(rep.ratios.begin(), rep.ratios.end(), [&](double r) {
    return r > opts.ratio_threshold;
  });
  if (rep.plateau_nodes >= 3) {
    rep.verdict = Verdict::Degenerate;
  } else if (all_grow || rep.order >= 1.0) {
    rep.verdict = Verdict::Holds;
  } else if (none_grow && rep.order < 1.0) {
    rep.verdict = Verdict::Fails;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "criterion likely holds";
    case Verdict::Fails:
      return "criterion likely fails";
    case Verdict::Degenerate:
      return "degenerate max - criterion holds trivially";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

double generalized_eigen_residual(const SampledSystem& s, double lambda, const SpectralOptions& opts) {
  if (s.l2() == 0) return spectral_bound(assemble(s), opts).s - lambda;
  if (s.l1 == 0) throw DomainError("generalized_eigen_residual: no diffusing species");

  const auto eta22 = kappa_and_eta22(s).eta22.value();
  if (!(lambda > eta22)) {
    std::ostringstream msg;
    msg << "generalized_eigen_residual: lambda = " << lambda << " must exceed eta22 = " << eta22;
    throw DomainError(msg.str());
  }

  const std::size_t n = s.n();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto& w = s.grid.weights();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.l1) * ni, static_cast<Eigen::Index>(s.l1) * ni);
  std::vector<std::vector<double>> chi(s.l1);
  for (std::size_t i = 0; i < s.l1; ++i) {
    chi[i] = compute_chi(s.kernels[i], s.grid);
    const auto off = static_cast<Eigen::Index>(i) * ni;
    for (Eigen::Index b = 0; b < ni; ++b)
      T.block(off, off, ni, ni).col(b) = s.d[i] * s.kernels[i].col(b) * w[static_cast<std::size_t>(b)];
  }
  for (std::size_t a = 0; a < n; ++a) {
    Eigen::MatrixXd A = s.coefficients[a];
    for (std::size_t i = 0; i < s.l1; ++i) A(i, i) -= s.d[i] * chi[i][a];
    const auto F = schur_reduce_unchecked(A, s.l1, lambda).matrix.matrix();
    for (std::size_t i = 0; i < s.l1; ++i)
      for (std::size_t j = 0; j < s.l1; ++j)
        T(static_cast<Eigen::Index>(i * n + a), static_cast<Eigen::Index>(j * n + a)) += F(i, j);
  }
  return spectral_bound(T, opts).s - lambda;
}

SweepTable sweep(const SampledSystem& sampled, std::vector<double> t_schedule,
                 SweepMode mode, const ReducedQuantities& reduced, const SpectralOptions& opts) {
  SweepTable table;
  table.mode = mode;
  double ref = 0.0;
  switch (mode) {
    case SweepMode::SmallD:
      table.reference_kind = Reference::Kappa;
      ref = reduced.kappa;
      break;
    case SweepMode::LargeDNonDegen:
      table.reference_kind = Reference::KappaTilde;
      ref = reduced.kappa_tilde;
      break;
    case SweepMode::LargeDDegen:
      if (!reduced.threshold) throw DomainError("sweep: large-d-degen mode needs a threshold classification");
      table.reference_kind =
          reduced.threshold->kind == Threshold::Case::A ? Reference::GammaStar : Reference::Eta22;
      ref = reduced.threshold->value;
      break;
  }

  for (double t : t_schedule)
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("sweep: t values must be positive and finite");
  std::sort(t_schedule.begin(), t_schedule.end());

  for (double t : t_schedule) {
    SampledSystem scaled = sampled;
    for (std::size_t i = 0; i < scaled.l; ++i)
      if (mode == SweepMode::SmallD || i < scaled.l1) scaled.d[i] = sampled.d[i] * t;
    const auto op = assemble(scaled);
    const auto sb = spectral_bound(op, opts);
    SweepRow row;
    row.t = t;
    row.s = sb.s;
    row.s_e = essential_bound(pointwise_A(scaled), opts.tol);
    row.gap = row.s - row.s_e;
    row.reference = ref;
    row.deviation = std::abs(row.s - ref);
    row.converged = sb.converged;
    table.rows.push_back(row);
  }
  return table;
}

void write_csv(std::ostream& out, const SweepTable& table) {
  out << "t,s,s_e,gap,reference,deviation,converged\n";
  for (const auto& r : table.rows) {
    out << format17(r.t) << ',' << format17(r.s) << ',' << format17(r.s_e) << ',' << format17(r.gap) << ','
        << format17(r.reference) << ',' << format17(r.deviation) << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::SmallD:
      return "small-d";
    case SweepMode::LargeDNonDegen:
      return "large-d-nondegen";
    case SweepMode::LargeDDegen:
      return "large-d-degen";
  }
  return "?";
}

std::string to_string(Reference r) {
  switch (r) {
    case Reference::Kappa:
      return "kappa";
    case Reference::KappaTilde:
      return "kappa_tilde";
    case Reference::GammaStar:
      return "gamma_star";
    case Reference::Eta22:
      return "eta22";
  }
  return "?";
}

std::optional<SweepMode> parse_sweep_mode(const std::string& text) {
  for (auto m : {SweepMode::SmallD, SweepMode::LargeDNonDegen, SweepMode::LargeDDegen})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

ProbeResult perturbation_probe(const SampledSystem& sampled, double delta, std::uint64_t seed, ProbeMode mode,
                               const SpectralOptions& opts) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("perturbation_probe: delta must be finite and >= 0");

  const auto base = assemble(sampled);
  const auto sb = spectral_bound(base, opts);
  ProbeResult out;
  out.s_base = sb.s;

  Eigen::MatrixXd perturbed;
  if (mode == ProbeMode::DiagonalShift) {
    perturbed = base.matrix;
    perturbed.diagonal().array() += delta;
    out.dM = delta;
  } else {
    SampledSystem p = sampled;
    if (delta > 0.0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> up(0.0, delta);
      std::uniform_real_distribution<double> sym(-delta, delta);
      for (auto& M : p.coefficients) {
        const auto before = M;
        for (Eigen::Index i = 0; i < M.rows(); ++i)
          for (Eigen::Index j = 0; j < M.cols(); ++j) M(i, j) += i == j ? sym(rng) : up(rng);
        out.dM = std::max(out.dM, (M - before).cwiseAbs().rowwise().sum().maxCoeff());
      }
      for (auto& K : p.kernels) {
        const auto before = K;
        for (Eigen::Index b = 0; b < K.cols(); ++b)
          for (Eigen::Index a = 0; a < K.rows(); ++a) K(a, b) += up(rng);
        out.dK = std::max(out.dK, (K - before).cwiseAbs().maxCoeff());
      }
    }
    perturbed = assemble(p).matrix;
  }

  out.s_perturbed = spectral_bound(perturbed, opts).s;
  out.ds = out.s_perturbed - out.s_base;
  if (sb.eigvec && sb.eigvec->minCoeff() > 0.0) {
    const Eigen::VectorXd& v = *sb.eigvec;
    const Eigen::VectorXd ratio = (perturbed * v).cwiseQuotient(v);
    out.sandwich_bound = std::max(std::abs(ratio.maxCoeff() - out.s_base), std::abs(ratio.minCoeff() - out.s_base));
  } else {
    out.sandwich_bound = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace nlds
