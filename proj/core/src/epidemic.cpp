#include "nlds/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlds/assembly.hpp"
#include "nlds/error.hpp"
#include "nlds/opspec.hpp"
#include "nlds/perron.hpp"
#include "nlds/search.hpp"

namespace nlds {

namespace {

Eigen::VectorXd sample_field(const Expr& e, const Grid& grid, const char* name, bool allow_zero) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double v = e.eval(grid.point(a));
    if (!(allow_zero ? v >= 0.0 : v > 0.0)) {
      std::ostringstream msg;
      msg << name << "(" << grid.point(a) << ") = " << v << (allow_zero ? " is negative" : " is not positive");
      throw DomainError(msg.str());
    }
    out(static_cast<Eigen::Index>(a)) = v;
  }
  return out;
}

// L - diag m
Eigen::MatrixXd virus_block(const SampledVSI& v) {
  Eigen::MatrixXd X = dispersal_block(v.kernel, v.grid, v.d);
  X.diagonal() -= v.m;
  return X;
}

}  // namespace

SampledVSI sample(const VSIParams& p, const Grid& grid) {
  if (!(p.d >= 0.0) || !std::isfinite(p.d)) throw DomainError("viral diffusion rate must be finite and >= 0");
  if (grid.a() != p.domain.a || grid.b() != p.domain.b) throw DimensionError("grid interval differs from the domain");
  SampledVSI v;
  v.grid = grid;
  v.d = p.d;
  const std::size_t n = grid.size();
  v.kernel.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      v.kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = p.kernel.expr.eval(grid.point(a), grid.point(b));
  if (v.kernel.minCoeff() < 0.0) throw DomainError("viral kernel takes negative values");
  v.r = sample_field(p.r, grid, "r", false);
  v.m = sample_field(p.m, grid, "m", false);
  v.b = sample_field(p.b, grid, "b", false);
  v.beta_d = sample_field(p.beta_d, grid, "beta_d", false);
  v.beta_i = sample_field(p.beta_i, grid, "beta_i", true);
  v.outside_assumptions = v.beta_i.minCoeff() == 0.0;
  return v;
}

EpidemicOperators assemble_epidemic(const SampledVSI& v) {
  const auto n = static_cast<Eigen::Index>(v.grid.size());
  EpidemicOperators ops;
  ops.B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ops.F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ops.B.topLeftCorner(n, n) = virus_block(v);
  ops.B.topRightCorner(n, n).diagonal() = v.r;
  ops.B.bottomRightCorner(n, n).diagonal() = -v.b;
  ops.F.bottomLeftCorner(n, n).diagonal() = v.beta_i;
  ops.F.bottomRightCorner(n, n).diagonal() = v.beta_d;
  return ops;
}

R0Result r0(const SampledVSI& v, double tol) {
  const Eigen::MatrixXd X = virus_block(v);
  R0Result out;
  out.s_B = std::max(spectral_bound(X).s, (-v.b).maxCoeff());
  if (!(out.s_B < 0.0)) {
    std::ostringstream msg;
    msg << "invalid parameters: s(B) = " << out.s_B << " is not negative";
    throw DomainError(msg.str());
  }

  // -X^{-1} is nonnegative because X is Metzler with s(X) < 0.
  const Eigen::VectorXd r_over_b = v.r.cwiseQuotient(v.b);
  Eigen::MatrixXd G = (-X).partialPivLu().solve(Eigen::MatrixXd(r_over_b.asDiagonal()));
  G = v.beta_i.asDiagonal() * G;
  G = G.cwiseMax(0.0);
  G.diagonal() += v.beta_d.cwiseQuotient(v.b);

  PerronOptions opts;
  opts.tol = tol;
  const auto res = metzler_perron<double>(G, opts);
  if (!res.converged) {
    throw ConvergenceError("r0: power iteration did not converge", res.root,
                           std::vector<double>(res.right.begin(), res.right.end()));
  }
  out.r0 = res.root;
  out.converged = res.converged;
  out.iterations = res.iterations;
  out.residual = res.residual;
  return out;
}

double H_mu(const SampledVSI& v, double mu) {
  if (!(mu > 0.0)) throw DomainError("H_mu: mu must be positive");
  const auto ops = assemble_epidemic(v);
  return spectral_bound(Eigen::MatrixXd(ops.B + ops.F / mu)).s;
}

double hat_r0(const SampledVSI& v) { return v.beta_d.cwiseQuotient(v.b).maxCoeff(); }

double r0_small_d_limit(const SampledVSI& v) {
  const Eigen::VectorXd val = v.beta_d.cwiseQuotient(v.b) +
                              v.beta_i.cwiseProduct(v.r).cwiseQuotient(v.b.cwiseProduct(v.m));
  return val.maxCoeff();
}

double q_of_mu(const SampledVSI& v, const PerronWeight& weight, double mu) {
  const double hat = hat_r0(v);
  if (!(mu > hat)) {
    std::ostringstream msg;
    msg << "q_of_mu: mu = " << mu << " must exceed hat R0 = " << hat;
    throw DomainError(msg.str());
  }
  const auto& w = v.grid.weights();
  double sum = 0.0;
  for (Eigen::Index a = 0; a < v.m.size(); ++a) {
    const auto k = static_cast<std::size_t>(a);
    const double integrand = -v.m(a) + v.r(a) * v.beta_i(a) / (mu * v.b(a) - v.beta_d(a));
    sum += integrand * weight.p[k] * w[k];
  }
  return sum;
}

R0Limit r0_large_d_limit(const VSIParams& params, const SampledVSI& v, const PerronWeight& weight,
                         const LimitOptions& opts) {
  R0Limit out;
  out.hat_r0 = hat_r0(v);
  out.hat_r0_sup = refine_sup([&](double x) { return params.beta_d.eval(x) / params.b.eval(x); }, v.grid).value;
  out.r0_zero = r0_small_d_limit(v);
  out.margin = 1e-4;

  auto Q = [&](double mu) { return q_of_mu(v, weight, mu); };
  const auto ladder = epsilon_ladder(Q, out.hat_r0_sup, 0.0, out.margin);
  out.ladder = ladder.samples;
  if (!ladder.above) {
    out.kind = R0Limit::Case::Boundary;
    out.value = out.hat_r0_sup;
    return out;
  }
  const auto root = bisect_decreasing(Q, out.hat_r0_sup, opts.bisection_tol, opts.max_iter);
  out.kind = R0Limit::Case::Root;
  out.value = root.root;
  out.tilde_r0 = root.root;
  out.iterations = root.iterations;
  return out;
}

R0Report r0_report(const VSIParams& params, const Grid& grid, double tol) {
  const SampledVSI v = sample(params, grid);
  const PerronWeight weight = perron_weight(v.kernel, grid);
  R0Report rep;
  rep.r0 = r0(v, tol);
  rep.h_at_r0 = H_mu(v, rep.r0.r0);
  rep.limit = r0_large_d_limit(params, v, weight);
  rep.outside_assumptions = v.outside_assumptions;
  rep.q_samples = rep.limit.ladder;
  for (double step : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double mu = rep.limit.hat_r0_sup + step;
    rep.q_samples.emplace_back(mu, q_of_mu(v, weight, mu));
  }
  return rep;
}

std::string to_string(R0Limit::Case c) { return c == R0Limit::Case::Root ? "RootCase" : "BoundaryCase"; }

}  // namespace nlds
