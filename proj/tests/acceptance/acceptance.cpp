// Acceptance run: one PASS/FAIL line per criterion. Reference values come from
// closed forms, scalar bisection or dense eigensolves computed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nlds/analysis.hpp"
#include "nlds/assembly.hpp"
#include "nlds/epidemic.hpp"
#include "nlds/matspec.hpp"
#include "nlds/opspec.hpp"
#include "nlds/reduce.hpp"
#include "support/systems.hpp"

namespace fs = std::filesystem;
using namespace nlds;
using nlds::testing::Gen;

namespace tol {
constexpr double kConstant = 1e-8;
constexpr double kSmallD = 5e-3;
constexpr double kLargeD = 5e-3;
constexpr double kCaseA = 1e-2;
constexpr double kGammaAgreement = 1e-6;
constexpr double kCaseBUpper = 0.05;
constexpr double kOracle = 1e-8;
constexpr double kGrowth = 1e-3;
constexpr double kWeightResidual = 1e-10;
constexpr double kWeightEigen = 1e-10;
constexpr double kWeightFlat = 1e-12;
constexpr double kGenEigen = 1e-6;
constexpr double kFieldOrder = 1e-10;
constexpr double kFieldMax = 1e-9;
constexpr double kIntegral = 0.05;
constexpr double kR0 = 1e-6;
constexpr double kH = 1e-8;
constexpr double kTildeR0 = 1e-8;
constexpr double kHeavyLimit = 1e-2;
constexpr double kShift = 1e-12;
constexpr double kFixedPoint = 1e-10;
constexpr double kShiftLimit = 1e-2;
}  // namespace tol

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [" << why << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [threw: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double dense_max_re(const Eigen::MatrixXd& A) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().real().maxCoeff();
}

double s_of(const DispersalSystem& sys, std::size_t n) {
  return spectral_bound(assemble_operator(sys, build_grid(sys.domain.a, sys.domain.b, n))).s;
}

// Midpoint nodes and weights of (-1, 1), built here rather than through Grid.
std::vector<double> nodes(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t a = 0; a < n; ++a) x[a] = -1.0 + (2.0 * a + 1.0) / n;
  return x;
}

// gamma* for M = [[-1 - 0.2x^2, 1], [1, -1]]: the symmetric Gaussian kernel has
// constant Perron weight 1/2, so B~_gamma = sum_a w_a/2 (-1 - 0.2x_a^2 + 1/(gamma + 1)).
double gamma_star_oracle(std::size_t n) {
  const auto x = nodes(n);
  const double w = 2.0 / n;
  auto f = [&](double g) {
    double b = 0.0;
    for (double xa : x) b += 0.5 * w * (-1.0 - 0.2 * xa * xa + 1.0 / (g + 1.0));
    return b - g;
  };
  double lo = -1.0 + 1e-12, hi = 10.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Nodewise H = s(A(x)) and h = s(F_eta(x)) for a 2x2 system with l1 = 1 and
// a Gaussian kernel. Long double and the cancellation-free root form, since
// a11 is of order d while H stays of order one. The nodes are taken from the
// grid: near a cusp of m22, h reacts to one-ulp shifts of x.
struct FieldOracle {
  std::vector<double> H, h;
};

FieldOracle field_oracle(const std::function<double(double)>& m11, double m12, double m21,
                         const std::function<double(double)>& m22, double d, const std::vector<double>& x) {
  using LD = long double;
  const std::size_t n = x.size();
  const LD w = 2.0L / LD(n), bc = LD(m12) * m21;
  std::vector<LD> a11(n), a22(n), H(n);
  for (std::size_t a = 0; a < n; ++a) {
    LD chi = 0.0L;
    for (std::size_t b = 0; b < n; ++b) chi += std::exp(-LD(x[a] - x[b]) * (x[a] - x[b])) * w;
    a11[a] = m11(x[a]) - d * chi;
    a22[a] = m22(x[a]);
    const LD half = (a11[a] - a22[a]) / 2, root = std::sqrt(half * half + bc);
    H[a] = half <= 0 ? a22[a] + bc / (root - half) : a11[a] + bc / (root + half);
  }
  const LD eta = *std::max_element(H.begin(), H.end());
  FieldOracle o;
  for (std::size_t a = 0; a < n; ++a) {
    o.H.push_back(static_cast<double>(H[a]));
    o.h.push_back(static_cast<double>(a11[a] + bc / (eta - a22[a])));
  }
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

VSIParams vsi(const char* m, double d) {
  return VSIParams{KernelSpec{Expr::parse(nlds::testing::kGaussian)},
                   d,
                   Expr::parse("1"),
                   Expr::parse(m),
                   Expr::parse("1"),
                   Expr::parse("0.5"),
                   Expr::parse("1"),
                   Interval{-1.0, 1.0}};
}

double dense_r0(const SampledVSI& v) {
  const auto ops = assemble_epidemic(v);
  const Eigen::MatrixXd NG = -ops.F * ops.B.inverse();
  return Eigen::EigenSolver<Eigen::MatrixXd>(NG, false).eigenvalues().cwiseAbs().maxCoeff();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_timings(const fs::path& p) {
  auto j = nlohmann::json::parse(slurp(p));
  j.erase("timings");
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, work = "acceptance_work";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    else if (flag == "--work") work = argv[i + 1];
  }

  criterion(1, "constant invariance", [](Outcome& o) {
    double worst = 0.0;
    for (double d : {0.0, 0.1, 1.0, 10.0, 100.0}) worst = std::max(worst, std::abs(s_of(testing::constant_system(d), 200)));
    o.detail << " max|s| = " << fmt(worst);
    o.require(worst <= tol::kConstant, "exceeds " + fmt(tol::kConstant));
  });

  criterion(2, "small-diffusion limit", [](Outcome& o) {
    const auto sys = testing::quadratic_system(1.0);
    const auto sampled = sample(sys, build_grid(-1.0, 1.0, 400));
    const auto red = reduce(sys, sampled);
    auto rows = sweep(sampled, {1.0, 1e-1, 1e-2, 1e-3}, SweepMode::SmallD, red).rows;
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.t > b.t; });
    const double last = std::abs(rows.back().s - red.kappa);
    bool monotone = true;
    for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].deviation < rows[k - 1].deviation;
    o.detail << " kappa = " << fmt(red.kappa) << ", |s - kappa| at t=1e-3 = " << fmt(last);
    o.require(last <= tol::kSmallD, "exceeds " + fmt(tol::kSmallD));
    o.require(monotone, "deviation not monotone");
  });

  criterion(3, "large-diffusion limit, non-degenerate", [](Outcome& o) {
    const double dev = std::abs(s_of(testing::quadratic_system(1e3), 400) - 2.0 / 3.0);
    o.detail << " |s - 2/3| at t=1e3 = " << fmt(dev);
    o.require(dev <= tol::kLargeD, "exceeds " + fmt(tol::kLargeD));
  });

  criterion(4, "partially degenerate Case A", [](Outcome& o) {
    const auto sys = testing::case_a_system(1.0);
    const auto sampled = sample(sys, build_grid(-1.0, 1.0, 400));
    const auto th = classify_threshold(sys, sampled, perron_weights(sampled));
    const double oracle = gamma_star_oracle(800);
    const double s = s_of(testing::case_a_system(1e4), 400);
    o.detail << " case " << to_string(th.kind) << ", gamma* = " << fmt(th.value) << ", oracle gap "
             << fmt(std::abs(th.value - oracle)) << ", |s - gamma*| at t=1e4 = " << fmt(std::abs(s - th.value));
    o.require(th.kind == Threshold::Case::A, "not Case A");
    o.require(std::abs(th.value - oracle) <= tol::kGammaAgreement, "gamma* disagrees with oracle");
    o.require(std::abs(s - th.value) <= tol::kCaseA, "s far from gamma*");
  });

  criterion(5, "partially degenerate Case B", [](Outcome& o) {
    const auto sys = testing::case_b_system(1.0);
    const auto sampled = sample(sys, build_grid(-1.0, 1.0, 400));
    const auto th = classify_threshold(sys, sampled, perron_weights(sampled));
    std::vector<double> s;
    for (double t : {1e2, 1e3, 1e4}) s.push_back(s_of(testing::case_b_system(t), 400));
    o.detail << " case " << to_string(th.kind) << ", eta22 = " << fmt(th.value) << ", s(t) = " << fmt(s[0]) << ", "
             << fmt(s[1]) << ", " << fmt(s[2]);
    o.require(th.kind == Threshold::Case::B, "not Case B");
    o.require(s[2] > 0.0 && s[2] <= tol::kCaseBUpper, "s(1e4) outside (0, 0.05]");
    o.require(s[0] > s[1] && s[1] > s[2], "s not strictly decreasing");
  });

  criterion(6, "power iteration vs dense spectrum", [](Outcome& o) {
    Gen gen(6060);
    double worst = 0.0;
    int compared = 0;
    while (compared < 20) {
      const auto sys = gen.valid_system(3);
      const std::size_t n = gen.index(10, 300 / sys.l);
      const auto grid = build_grid(-1.0, 1.0, n);
      if (!validate(sys, grid).passed()) continue;
      const auto P = assemble_operator(sys, grid);
      double dense = -1e300;
      for (const auto& z : dense_spectrum(P)) dense = std::max(dense, z.real());
      worst = std::max(worst, std::abs(spectral_bound(P).s - dense));
      ++compared;
    }
    o.detail << " max deviation over 20 systems = " << fmt(worst);
    o.require(worst <= tol::kOracle, "exceeds " + fmt(tol::kOracle));
  });

  criterion(7, "growth rate matches spectral bound", [](Outcome& o) {
    const std::vector<std::pair<DispersalSystem, std::size_t>> runs{
        {testing::constant_system(1.0), 200}, {testing::quadratic_system(1.0), 400},
        {testing::quadratic_system(1e-3), 400}, {testing::case_a_system(1.0), 400},
        {testing::case_a_system(1e4), 400}};
    double worst = 0.0;
    int certified = 0;
    for (const auto& [sys, n] : runs) {
      const auto grid = build_grid(-1.0, 1.0, n);
      const auto P = assemble_operator(sys, grid);
      const auto rep = spectral_report(P, pointwise_A(sys, grid));
      if (!rep.certificate.exists) continue;
      ++certified;
      worst = std::max(worst, std::abs(growth_rate(P, 200.0 / rep.gap) - rep.s));
    }
    o.detail << " certified runs = " << certified << ", max |growth - s| = " << fmt(worst);
    o.require(certified > 0, "no certified run");
    o.require(worst <= tol::kGrowth, "exceeds " + fmt(tol::kGrowth));
  });

  criterion(8, "Perron weights", [](Outcome& o) {
    const auto grid = build_grid(-1.0, 1.0, 200);
    const std::vector<std::pair<const char*, bool>> kernels{
        {"exp(-(x-y)^2)", true}, {"exp(-(x-y-0.3)^2)", false}, {"1 + x*y", true}};
    for (const auto& [k, symmetric] : kernels) {
      const auto w = perron_weight(KernelSpec{Expr::parse(k)}, grid);
      const auto [lo, hi] = std::minmax_element(w.p.begin(), w.p.end());
      o.detail << " " << k << ": res " << fmt(w.residual) << ", |lambda-1| " << fmt(std::abs(w.eigenvalue - 1.0));
      o.require(w.residual <= tol::kWeightResidual, std::string(k) + " residual");
      o.require(std::abs(w.eigenvalue - 1.0) <= tol::kWeightEigen, std::string(k) + " eigenvalue");
      if (symmetric) {
        o.detail << ", spread " << fmt(*hi - *lo);
        o.require(*hi - *lo <= tol::kWeightFlat, std::string(k) + " not constant");
      }
      o.detail << ";";
    }
  });

  criterion(9, "generalized eigenvalue residual", [](Outcome& o) {
    int certified = 0;
    double worst = 0.0;
    for (const auto& sys : {testing::case_a_system(1.0), testing::case_a_system(100.0), testing::case_a_system(1e4),
                            testing::case_b_system(1.0), testing::case_b_system(100.0)}) {
      const auto grid = build_grid(-1.0, 1.0, 400);
      const auto sampled = sample(sys, grid);
      const auto rep = spectral_report(assemble(sampled), pointwise_A(sampled));
      if (!rep.certificate.exists) continue;
      ++certified;
      worst = std::max(worst, std::abs(generalized_eigen_residual(sampled, rep.certificate.lambda)));
    }
    o.detail << " certified runs = " << certified << ", max residual = " << fmt(worst);
    o.require(certified > 0, "no certified run");
    o.require(worst <= tol::kGenEigen, "exceeds " + fmt(tol::kGenEigen));
  });

  criterion(10, "spectral field laws", [](Outcome& o) {
    struct Run {
      const char* label;
      DispersalSystem sys;
      FieldOracle oracle;
    };
    const std::size_t n = 400;
    auto caseA_m11 = [](double x) { return -1.0 - 0.2 * x * x; };
    auto caseB_m22 = [](double x) { return -std::pow(std::abs(x), 0.5); };
    const auto x = build_grid(-1.0, 1.0, n).points();
    for (double t : {1.0, 1e4}) {
      const std::vector<Run> runs{
          {"A", testing::case_a_system(t), field_oracle(caseA_m11, 1.0, 1.0, [](double) { return -1.0; }, t, x)},
          {"B", testing::case_b_system(t), field_oracle([](double) { return -2.0; }, 0.1, 0.1, caseB_m22, t, x)}};
      for (const auto& run : runs) {
        const auto f = spectral_field(sample(run.sys, build_grid(-1.0, 1.0, n)));
        double order = -1e300, oracle_gap = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          order = std::max(order, f.h[a] - f.H[a]);
          oracle_gap = std::max({oracle_gap, std::abs(f.H[a] - run.oracle.H[a]), std::abs(f.h[a] - run.oracle.h[a])});
        }
        const double maxdiff = std::abs(*std::max_element(f.h.begin(), f.h.end()) - f.eta);
        o.detail << " " << run.label << " t=" << fmt(t) << ": max(h-H) " << fmt(order) << ", |max h - eta| " << fmt(maxdiff)
                 << ", oracle " << fmt(oracle_gap) << ";";
        o.require(order <= tol::kFieldOrder, "h above H");
        o.require(maxdiff <= tol::kFieldMax, "max h differs from eta");
        o.require(oracle_gap <= tol::kFieldOrder, "field disagrees with oracle");
      }
    }
  });

  criterion(11, "integrability diagnostic", [](Outcome& o) {
    const Interval dom{-1.0, 1.0};
    const std::vector<std::size_t> sizes{100, 200, 400};
    const auto smooth = integrability_diagnostic([](const Grid&, double x) { return 1.0 - x * x; }, dom, sizes, dom);
    const auto cusp = integrability_diagnostic(
        [](const Grid&, double x) { return 1.0 - std::sqrt(std::abs(x)); }, dom, sizes, dom);
    const double rel = std::abs(cusp.integrals.back() - 4.0) / 4.0;
    o.detail << " 1-x^2: " << to_string(smooth.verdict) << " p = " << fmt(smooth.order) << "; 1-|x|^0.5: "
             << to_string(cusp.verdict) << " I_400 = " << fmt(cusp.integrals.back());
    o.require(smooth.verdict == Verdict::Holds, "smooth field not Holds");
    o.require(smooth.order >= 1.8 && smooth.order <= 2.2, "fitted order outside [1.8, 2.2]");
    o.require(cusp.verdict == Verdict::Fails, "cusp field not Fails");
    o.require(rel <= tol::kIntegral, "I_n not within 5% of 4");
  });

  criterion(12, "basic reproduction ratio", [](Outcome& o) {
    const auto grid = build_grid(-1.0, 1.0, 50);
    double worst_r0 = 0.0, worst_dense = 0.0, worst_h = 0.0;
    for (double d : {0.0, 1.0, 100.0}) {
      const auto v = sample(vsi("1", d), grid);
      const double r = r0(v).r0;
      worst_r0 = std::max(worst_r0, std::abs(r - 1.5));
      worst_dense = std::max(worst_dense, std::abs(dense_r0(v) - 1.5));
      worst_h = std::max(worst_h, std::abs(H_mu(v, r)));
    }
    const auto rep = r0_report(vsi("1", 1.0), grid);
    const double tilde = rep.limit.tilde_r0.value_or(NAN);
    o.detail << " max|R0 - 1.5| " << fmt(worst_r0) << " (dense " << fmt(worst_dense) << "), max|H| " << fmt(worst_h)
             << ", limit " << to_string(rep.limit.kind) << " " << fmt(tilde) << ";";
    o.require(worst_r0 <= tol::kR0 && worst_dense <= tol::kR0, "R0 off 1.5");
    o.require(worst_h <= tol::kH, "H(R0) not zero");
    o.require(rep.limit.kind == R0Limit::Case::Root && std::abs(tilde - 1.5) <= tol::kTildeR0, "limit not Root 1.5");

    const auto heavy = r0_report(vsi("100", 1e4), grid);
    o.detail << " m=100: limit " << to_string(heavy.limit.kind) << " " << fmt(heavy.limit.value) << ", R0(1e4) "
             << fmt(heavy.r0.r0);
    o.require(heavy.limit.kind == R0Limit::Case::Boundary, "heavy clearance not BoundaryCase");
    o.require(std::abs(heavy.r0.r0 - 0.5) <= tol::kHeavyLimit, "R0(1e4) not near 0.5");
  });

  criterion(13, "continuity probe", [](Outcome& o) {
    const auto sampled = sample(testing::quadratic_system(1.0), build_grid(-1.0, 1.0, 400));
    const std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> medians;
    bool within = true;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      std::vector<double> mags;
      for (std::size_t j = 0; j < 5; ++j) {
        const auto p = perturbation_probe(sampled, deltas[k], 1000003ULL * k + j);
        within = within && std::abs(p.ds) <= p.sandwich_bound;
        mags.push_back(std::abs(p.ds));
      }
      medians.push_back(median(mags));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < medians.size(); ++k) decreasing = decreasing && medians[k] < medians[k - 1];
    const auto shift = perturbation_probe(sampled, 0.5, 0, ProbeMode::DiagonalShift);
    o.detail << " medians " << fmt(medians[0]) << " " << fmt(medians[1]) << " " << fmt(medians[2]) << " "
             << fmt(medians[3]) << ", shift error " << fmt(std::abs(shift.ds - 0.5));
    o.require(within, "bound violated");
    o.require(decreasing, "medians not decreasing");
    o.require(std::abs(shift.ds - 0.5) <= tol::kShift, "diagonal shift");
  });

  criterion(14, "matrix lemma suite", [](Outcome& o) {
    Gen gen(1414);
    int strict = 0, fixed = 0, limit = 0, irreducible = 0, total = 0;
    double worst_fixed = 0.0, worst_limit = 0.0;
    while (total < 50) {
      const std::size_t l = gen.index(2, 6);
      const Eigen::MatrixXd C = gen.coin() ? gen.coop_matrix(l, 0.05, 1.0) : gen.sparse_irreducible(l, 1.0);
      if (!is_irreducible(C)) continue;
      ++total;
      const std::size_t l1 = gen.index(1, l - 1), l2 = l - l1;
      const CoopMatrix M(C);
      const double s = dense_max_re(C);
      const Eigen::MatrixXd C22 = C.bottomRightCorner(l2, l2);
      const double s22 = dense_max_re(C22);
      if (perron_bound(M.block22(l1)) < perron_bound(M) && s22 < s) ++strict;

      const double fp = std::abs(dense_max_re(schur_reduce(M, l1, s).matrix.matrix()) - s);
      worst_fixed = std::max(worst_fixed, fp);
      if (fp <= tol::kFixedPoint * (1.0 + std::abs(s))) ++fixed;

      const std::vector<double> mu{1.0, 10.0, 100.0, 1000.0};
      const auto v = large_shift_limit_check(M, l1, mu);
      bool dec = true;
      for (std::size_t k = 1; k < v.size(); ++k) dec = dec && v[k] < v[k - 1];
      Eigen::MatrixXd shifted = C;
      shifted.topLeftCorner(l1, l1).diagonal().array() -= mu.back();
      const double dev = std::abs(v.back() - s22);
      worst_limit = std::max(worst_limit, dev);
      if (dec && dev <= tol::kShiftLimit && std::abs(dense_max_re(shifted) - v.back()) <= 1e-10) ++limit;

      const double gamma = s22 + 0.5;
      if (is_irreducible(schur_reduce(M, l1, gamma).matrix)) ++irreducible;
    }
    o.detail << " (i) " << strict << "/50, (ii) " << fixed << "/50 max " << fmt(worst_fixed) << ", (iii) " << limit
             << "/50 max " << fmt(worst_limit) << ", (iv) " << irreducible << "/50";
    o.require(strict == 50 && fixed == 50 && limit == 50 && irreducible == 50, "lemma item failed");
  });

  criterion(15, "determinism", [&](Outcome& o) {
    if (cli.empty()) {
      o.require(false, "no --cli given");
      return;
    }
    const std::string cfg = NLDS_CONFIG_DIR;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"spectrum", "constant.json"}, {"sweep", "quadratic.json"}, {"sweep", "quadratic_large.json"},
        {"sweep", "caseA.json"},       {"reduce", "caseA.json"},    {"sweep", "caseB.json"},
        {"reduce", "caseB.json"}};
    std::size_t compared = 0, differing = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& [cmd, file] = runs[k];
      fs::path dirs[2];
      for (int rep = 0; rep < 2; ++rep) {
        dirs[rep] = fs::path(work) / ("run" + std::to_string(rep)) / std::to_string(k);
        fs::remove_all(dirs[rep]);
        fs::create_directories(dirs[rep]);
        const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + cfg + "/" + file + "\" --out \"" +
                                 dirs[rep].string() + "\" --seed 7 --quiet";
        const int rc = std::system(line.c_str());
        o.require(rc == 0, cmd + " " + file + " exited nonzero");
      }
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const fs::path other = dirs[1] / entry.path().filename();
        const bool same = fs::exists(other) && (entry.path().extension() == ".json"
                                                    ? without_timings(entry.path()) == without_timings(other)
                                                    : slurp(entry.path()) == slurp(other));
        ++compared;
        if (!same) ++differing, o.require(false, entry.path().filename().string() + " differs");
      }
    }
    o.detail << " " << compared << " files compared, " << differing << " differ";
    o.require(compared >= runs.size(), "too few artifacts");
  });

  std::printf("%d of 15 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
