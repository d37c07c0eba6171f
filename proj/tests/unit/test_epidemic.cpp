#include <cmath>

#include <gtest/gtest.h>

#include "nlds/epidemic.hpp"
#include "nlds/error.hpp"
#include "support/systems.hpp"

using namespace nlds;

namespace {

VSIParams params(const char* r, const char* m, const char* b, const char* beta_d, const char* beta_i, double d) {
  return VSIParams{KernelSpec{Expr::parse(nlds::testing::kGaussian)},
                   d,
                   Expr::parse(r),
                   Expr::parse(m),
                   Expr::parse(b),
                   Expr::parse(beta_d),
                   Expr::parse(beta_i),
                   Interval{-1.0, 1.0}};
}

VSIParams base(double d) { return params("1", "1", "1", "0.5", "1", d); }

double dense_r0(const SampledVSI& v) {
  const auto ops = assemble_epidemic(v);
  const Eigen::MatrixXd NG = -ops.F * ops.B.inverse();
  return Eigen::EigenSolver<Eigen::MatrixXd>(NG, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Epidemic, SingleNodeOperators) {
  const auto v = sample(base(0.0), build_grid(-1.0, 1.0, 1));
  const auto ops = assemble_epidemic(v);
  Eigen::MatrixXd B(2, 2), F(2, 2);
  B << -1, 1, 0, -1;
  F << 0, 0, 1, 0.5;
  EXPECT_EQ(ops.B, B);
  EXPECT_EQ(ops.F, F);
}

TEST(Epidemic, BIsBlockUpperTriangularWithNegativeBound) {
  const auto v = sample(params("1 + x^2", "2", "1 + 0.5*cos(x)", "0.5", "1", 3.0), build_grid(-1.0, 1.0, 30));
  const auto ops = assemble_epidemic(v);
  EXPECT_TRUE(ops.B.bottomLeftCorner(30, 30).isZero());
  const double dense = Eigen::EigenSolver<Eigen::MatrixXd>(ops.B, false).eigenvalues().real().maxCoeff();
  EXPECT_LT(dense, 0.0);
  EXPECT_NEAR(r0(v).s_B, dense, 1e-10);
}

TEST(Epidemic, SamplingRejectsInvalidFields) {
  const Grid g = build_grid(-1.0, 1.0, 10);
  EXPECT_THROW(sample(params("1", "x", "1", "0.5", "1", 1.0), g), DomainError);
  EXPECT_THROW(sample(params("1", "1", "1", "0.5", "-1", 1.0), g), DomainError);
  EXPECT_THROW(sample(base(-1.0), g), DomainError);
  EXPECT_THROW(sample(base(1.0), build_grid(0.0, 1.0, 10)), DimensionError);
}

TEST(R0, ConstantCoefficients) {
  for (double d : {0.0, 1.0, 100.0}) {
    const auto v = sample(base(d), build_grid(-1.0, 1.0, 50));
    const auto r = r0(v);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.r0, 1.5, 1e-9) << "d = " << d;
    EXPECT_NEAR(dense_r0(v), 1.5, 1e-9) << "d = " << d;
    EXPECT_LE(std::abs(H_mu(v, r.r0)), 1e-8);
  }
}

TEST(R0, MatchesDenseOracleOnHeterogeneousParameters) {
  const auto v = sample(params("1 + 0.3*x", "1 + x^2", "1", "0.5 + 0.2*cos(pi*x)", "0.5*(1 + x^2)", 0.7),
                        build_grid(-1.0, 1.0, 60));
  EXPECT_NEAR(r0(v).r0, dense_r0(v), 1e-9);
}

TEST(R0, NoCellFreeRoute) {
  const auto v = sample(params("1", "1", "1 + 0.5*x^2", "0.5 + 0.1*x", "0", 1.0), build_grid(-1.0, 1.0, 40));
  EXPECT_TRUE(v.outside_assumptions);
  EXPECT_NEAR(r0(v).r0, hat_r0(v), 1e-10);
  EXPECT_NEAR(dense_r0(v), hat_r0(v), 1e-10);
}

TEST(R0, SmallDiffusionLimit) {
  const auto v = sample(params("1", "1 + x^2", "1", "0.5 + 0.2*cos(pi*x)", "1", 1e-4), build_grid(-1.0, 1.0, 200));
  EXPECT_LE(std::abs(r0(v).r0 - r0_small_d_limit(v)), 5e-3);
}

TEST(HMu, SignPattern) {
  const auto v = sample(base(1.0), build_grid(-1.0, 1.0, 40));
  EXPECT_NEAR(H_mu(v, 1.5), 0.0, 1e-8);
  EXPECT_LT(H_mu(v, 3.0), 0.0);
  EXPECT_GT(H_mu(v, 1.0), 0.0);
  // B has a Jordan-like coupling, so a 1e-12 perturbation moves s by about its square root.
  EXPECT_NEAR(H_mu(v, 1e12), r0(v).s_B, 1e-5);
  EXPECT_THROW(H_mu(v, 0.0), DomainError);
}

TEST(QMu, ConstantClosedForm) {
  const Grid g = build_grid(-1.0, 1.0, 40);
  const auto v = sample(base(1.0), g);
  const auto w = perron_weight(v.kernel, g);
  for (double mu : {0.6, 1.0, 1.5, 4.0}) EXPECT_NEAR(q_of_mu(v, w, mu), -1.0 + 1.0 / (mu - 0.5), 1e-12);
  EXPECT_THROW(q_of_mu(v, w, 0.5), DomainError);
  double prev = 1e300;
  for (double mu = 0.51; mu < 10.0; mu *= 1.3) {
    const double q = q_of_mu(v, w, mu);
    EXPECT_LT(q, prev);
    prev = q;
  }
}

TEST(LargeDLimit, ConstantsGiveRootCase) {
  const auto rep = r0_report(base(1.0), build_grid(-1.0, 1.0, 50));
  EXPECT_EQ(rep.limit.kind, R0Limit::Case::Root);
  ASSERT_TRUE(rep.limit.tilde_r0);
  EXPECT_NEAR(*rep.limit.tilde_r0, 1.5, 1e-8);
  EXPECT_NEAR(rep.limit.r0_zero, 1.5, 1e-12);
}

TEST(LargeDLimit, HeavyClearanceWithConstantRatioStillHasARoot) {
  // beta_d / b is flat, so Q blows up at hat R0 and the root 0.5 + 1/100 exists.
  const auto rep = r0_report(params("1", "100", "1", "0.5", "1", 1.0), build_grid(-1.0, 1.0, 50));
  EXPECT_EQ(rep.limit.kind, R0Limit::Case::Root);
  EXPECT_NEAR(rep.limit.value, 0.51, 1e-8);
  EXPECT_NEAR(rep.r0.r0, 0.51, 1e-9);
}

TEST(LargeDLimit, CuspedRatioGivesBoundaryCase) {
  // p = 1/2, so Q(hat R0+) = -10 + integral of |x|^{-1/2} = -6 < 0.
  const auto p = params("1", "10", "1", "0.5 - 0.5*abs(x)^0.5", "1", 1.0);
  const auto rep = r0_report(p, build_grid(-1.0, 1.0, 200));
  EXPECT_EQ(rep.limit.kind, R0Limit::Case::Boundary);
  EXPECT_NEAR(rep.limit.value, 0.5, 1e-4);
  EXPECT_FALSE(rep.limit.tilde_r0);
  // On the grid R0(d) falls toward the nodal max of beta_d / b, which sits below the cusp.
  double prev = 1e300;
  for (double d : {1.0, 100.0, 1e4}) {
    auto q = p;
    q.d = d;
    const auto v = sample(q, build_grid(-1.0, 1.0, 200));
    const double r = r0(v).r0;
    EXPECT_LT(r, prev);
    EXPECT_GT(r, hat_r0(v));
    prev = r;
  }
}

TEST(R0, InvalidWhenBIsNotStable) {
  SampledVSI v = sample(base(1.0), build_grid(-1.0, 1.0, 10));
  v.m.setConstant(-1.0);
  EXPECT_THROW(r0(v), DomainError);
}

TEST(EpidemicProperty, R0MatchesOracleAndZeroOfH) {
  nlds::testing::Gen gen(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const std::string r = gen.number(0.5, 2.0), m = gen.number(0.5, 3.0) + " + x^2",
                      b = gen.number(0.5, 2.0), bd = gen.number(0.1, 1.0) + " + 0.1*sin(3*x)",
                      bi = gen.number(0.1, 2.0);
    const auto p = params(r.c_str(), m.c_str(), b.c_str(), bd.c_str(), bi.c_str(), gen.uniform(0.0, 20.0));
    const auto v = sample(p, build_grid(-1.0, 1.0, gen.index(10, 60)));
    const auto res = r0(v);
    ASSERT_NEAR(res.r0, dense_r0(v), 1e-8);
    ASSERT_LE(std::abs(H_mu(v, res.r0)), 1e-8);
    ASSERT_GE(res.r0, hat_r0(v) - 1e-12);
  }
}
