#include "nlds/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlds/assembly.hpp"
#include "nlds/error.hpp"
#include "nlds/perron.hpp"

namespace nlds {

PerronWeight perron_weight(const Eigen::MatrixXd& K, const Grid& grid, double tol) {
  const auto chi = compute_chi(K, grid);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto& w = grid.weights();

  Eigen::MatrixXd KW(n, n);
  for (Eigen::Index b = 0; b < n; ++b) KW.col(b) = K.col(b) * w[static_cast<std::size_t>(b)];
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double c = chi[static_cast<std::size_t>(a)];
    if (!(c > 0.0)) {
      std::ostringstream msg;
      msg << "perron_weight: chi(" << grid.point(static_cast<std::size_t>(a)) << ") = " << c << " is not positive";
      throw DomainError(msg.str());
    }
    G.row(a) = KW.row(a) / c;
  }

  PerronOptions opts;
  opts.tol = tol;
  const auto r = metzler_perron<double>(G, opts);
  if (!r.converged) {
    throw ConvergenceError("perron_weight: power iteration did not converge", r.root,
                           std::vector<double>(r.right.begin(), r.right.end()));
  }

  PerronWeight out;
  out.eigenvalue = r.root;
  out.deviation = std::abs(r.root - 1.0);
  out.iterations = r.iterations;
  if (out.deviation > 100.0 * tol) {
    std::ostringstream msg;
    msg << "perron_weight: eigenvalue " << r.root << " deviates from 1 by " << out.deviation
        << "; the grid is too coarse for this kernel, refine it";
    throw ConsistencyError(msg.str());
  }

  Eigen::VectorXd p = r.right;
  double mass = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) mass += p(a) * w[static_cast<std::size_t>(a)];
  p /= mass;
  Eigen::VectorXd chi_p(n);
  for (Eigen::Index a = 0; a < n; ++a) chi_p(a) = chi[static_cast<std::size_t>(a)] * p(a);
  out.residual = (KW * p - chi_p).cwiseAbs().maxCoeff();
  out.p.assign(p.begin(), p.end());
  return out;
}

PerronWeight perron_weight(const KernelSpec& kernel, const Grid& grid, double tol) {
  const std::size_t n = grid.size();
  Eigen::MatrixXd K(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) K(a, b) = kernel.expr.eval(grid.point(a), grid.point(b));
  return perron_weight(K, grid, tol);
}

PerronWeight uniform_weight(const Grid& grid) {
  PerronWeight out;
  out.p.assign(grid.size(), 1.0 / grid.measure());
  out.uniform = true;
  return out;
}

bool PerronWeights::uses_fallback() const {
  return std::any_of(species.begin(), species.end(), [](const PerronWeight& w) { return w.uniform; });
}

PerronWeights perron_weights(const SampledSystem& s, double tol) {
  PerronWeights out;
  out.species.reserve(s.l);
  for (std::size_t i = 0; i < s.l; ++i)
    out.species.push_back(i < s.l1 ? perron_weight(s.kernels[i], s.grid, tol) : uniform_weight(s.grid));
  return out;
}

CoopMatrix reduced_tilde_M(const SampledSystem& s, const PerronWeights& weights) {
  if (weights.species.size() != s.l) throw DimensionError("reduced_tilde_M: need one weight per species");
  const auto& w = s.grid.weights();
  Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(s.l, s.l);
  for (std::size_t a = 0; a < s.n(); ++a)
    for (std::size_t i = 0; i < s.l; ++i)
      for (std::size_t j = 0; j < s.l; ++j) tm(i, j) += s.coefficients[a](i, j) * weights.species[j].p[a] * w[a];
  return CoopMatrix(std::move(tm));
}

namespace {

double s22(const Eigen::MatrixXd& M, std::size_t l1) {
  const auto k = static_cast<Eigen::Index>(M.rows()) - static_cast<Eigen::Index>(l1);
  return perron_bound(Eigen::MatrixXd(M.bottomRightCorner(k, k)));
}

}  // namespace

KappaEta kappa_and_eta22(const SampledSystem& s) {
  KappaEta out;
  out.kappa = -std::numeric_limits<double>::infinity();
  double eta = -std::numeric_limits<double>::infinity();
  for (const auto& M : s.coefficients) {
    out.kappa = std::max(out.kappa, perron_bound(M));
    if (s.l2() > 0) eta = std::max(eta, s22(M, s.l1));
  }
  if (s.l2() > 0) out.eta22 = eta;
  return out;
}

SupEstimate eta22_supremum(const DispersalSystem& sys, const Grid& grid) {
  if (sys.l2() == 0) throw DomainError("eta22_supremum: system has no non-diffusing species");
  return refine_sup([&](double x) { return s22(coefficients_at(sys, x), sys.l1); }, grid);
}

TildeB tilde_B(const SampledSystem& s, const PerronWeights& weights, double gamma) {
  if (s.l2() == 0) throw DomainError("tilde_B: system has no non-diffusing species");
  if (weights.species.size() < s.l1) throw DimensionError("tilde_B: missing Perron weights");
  const auto& w = s.grid.weights();
  const auto l1 = static_cast<Eigen::Index>(s.l1);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(l1, l1);
  bool near = false;
  bool ill = false;
  for (std::size_t a = 0; a < s.n(); ++a) {
    const auto& M = s.coefficients[a];
    const double s_node = s22(M, s.l1);
    if (!(gamma > s_node)) {
      std::ostringstream msg;
      msg << "tilde_B: gamma = " << gamma << " does not exceed s(M22(" << s.grid.point(a) << ")) = " << s_node;
      throw DomainError(msg.str());
    }
    if (gamma - s_node <= 1e-12) near = true;
    const auto red = schur_reduce_unchecked(M, s.l1, gamma);
    ill = ill || red.ill_conditioned;
    for (Eigen::Index i = 0; i < l1; ++i)
      for (Eigen::Index j = 0; j < l1; ++j) acc(i, j) += red.matrix(i, j) * weights.species[j].p[a] * w[a];
  }
  return {CoopMatrix(std::move(acc)), near, ill};
}

Threshold classify_threshold(const DispersalSystem& sys, const SampledSystem& s, const PerronWeights& weights,
                             const ThresholdOptions& opts) {
  if (s.l1 == 0 || s.l2() == 0) throw DomainError("classify_threshold: needs 0 < l1 < l");
  Threshold out;
  out.eta22 = eta22_supremum(sys, s.grid).value;
  out.margin = opts.margin.value_or(1e-4 * std::max(1.0, std::abs(out.eta22)));

  auto L = [&](double gamma) { return perron_bound(tilde_B(s, weights, gamma).matrix); };
  const auto ladder = epsilon_ladder(L, out.eta22, out.eta22, out.margin);
  out.ladder = ladder.samples;
  if (!ladder.above) {
    out.kind = Threshold::Case::B;
    out.value = out.eta22;
    return out;
  }

  const auto root = bisect_decreasing([&](double g) { return L(g) - g; }, out.eta22, opts.bisection_tol, opts.max_iter);
  out.kind = Threshold::Case::A;
  out.value = root.root;
  out.iterations = root.iterations;
  out.fixed_point_residual = std::abs(L(root.root) - root.root);
  return out;
}

ReducedQuantities reduce(const DispersalSystem& sys, const SampledSystem& s, double tol, const ThresholdOptions& opts) {
  auto weights = perron_weights(s, tol);
  auto tm = reduced_tilde_M(s, weights);
  const auto ke = kappa_and_eta22(s);
  ReducedQuantities out{std::move(weights), tm, ke.kappa, perron_bound(tm), ke.eta22, std::nullopt, std::nullopt};
  if (s.l1 > 0 && s.l2() > 0) {
    out.eta22_sup = eta22_supremum(sys, s.grid).value;
    out.threshold = classify_threshold(sys, s, out.weights, opts);
  }
  return out;
}

std::string to_string(Threshold::Case c) { return c == Threshold::Case::A ? "CaseA" : "CaseB"; }

}  // namespace nlds
