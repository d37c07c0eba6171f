#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nlds/error.hpp"
#include "nlds/matspec.hpp"
#include "support/systems.hpp"

using namespace nlds;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double dense_s(const Eigen::MatrixXd& C) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues().real().maxCoeff();
}

}  // namespace

TEST(CoopMatrix, RejectsNegativeOffDiagonal) {
  EXPECT_THROW(CoopMatrix(mat2(0, -1, 1, 0)), DomainError);
  EXPECT_THROW(CoopMatrix(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
  const CoopMatrix C(mat2(-5, 1, 2, -3));
  EXPECT_EQ(C.block11(1).order(), 1u);
  EXPECT_DOUBLE_EQ(C.block22(1)(0, 0), -3.0);
}

TEST(PerronBound, Examples) {
  EXPECT_NEAR(perron_bound(mat2(2, 1, 1, 2)), 3.0, 1e-12);
  EXPECT_NEAR(perron_bound(mat2(0, 1, 1, 0)), 1.0, 1e-12);
  EXPECT_NEAR(perron_bound(mat2(-2, 1, 4, -3)), (-5.0 + std::sqrt(17.0)) / 2.0, 1e-12);
}

TEST(PerronBound, ReducibleMatrix) {
  EXPECT_NEAR(perron_bound(mat2(1, 0, 1, 3)), 3.0, 1e-12);
  EXPECT_NEAR(perron_bound(mat2(-1, 0, 0, -4)), -1.0, 1e-12);
}

TEST(Irreducible, Examples) {
  EXPECT_TRUE(is_irreducible(mat2(0, 1, 1, 0)));
  EXPECT_FALSE(is_irreducible(mat2(1, 0, 1, 1)));
  Eigen::MatrixXd cyc = Eigen::MatrixXd::Zero(3, 3);
  cyc(0, 1) = cyc(1, 2) = cyc(2, 0) = 1.0;
  EXPECT_TRUE(is_irreducible(cyc));
  cyc(2, 0) = 1e-14;
  EXPECT_FALSE(is_irreducible(cyc));
  EXPECT_TRUE(is_irreducible(Eigen::MatrixXd::Constant(1, 1, -2.0)));
}

TEST(SchurReduce, ClosedForms) {
  const CoopMatrix C(mat2(0, 1, 1, 0));
  EXPECT_NEAR(schur_reduce(C, 1, 2.0).matrix(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(schur_reduce(C, 1, 1.0).matrix(0, 0), 1.0, 1e-15);
  EXPECT_GT(schur_reduce(C, 1, 2.0).matrix(0, 0), schur_reduce(C, 1, 4.0).matrix(0, 0));
  EXPECT_NEAR(schur_reduce(C, 1, 4.0).matrix(0, 0), 0.25, 1e-15);
  EXPECT_THROW(schur_reduce(C, 1, 0.0), DomainError);
  EXPECT_THROW(schur_reduce(C, 1, -1.0), DomainError);
}

TEST(SchurReduce, EmptyTrailingBlock) {
  const CoopMatrix C(mat2(-1, 1, 2, -3));
  const auto r = schur_reduce(C, 2, 0.0);
  EXPECT_EQ(r.matrix.matrix(), C.matrix());
  EXPECT_EQ(r.rcond, 1.0);
}

TEST(LargeShift, ClosedFormAndMonotone) {
  const CoopMatrix C(mat2(0, 1, 1, 0));
  const std::vector<double> mu{0.0, 1.0, 10.0, 100.0, 1000.0};
  const auto v = large_shift_limit_check(C, 1, mu);
  EXPECT_NEAR(v[0], 1.0, 1e-12);
  EXPECT_NEAR(v[4], (-1000.0 + std::sqrt(1e6 + 4.0)) / 2.0, 1e-12);
  EXPECT_NEAR(v[4], 0.0, 1e-2);
  for (std::size_t k = 1; k < v.size(); ++k) EXPECT_LT(v[k], v[k - 1]);
}

// The four matrix-lemma properties on seeded random irreducible cooperative matrices.
class MatrixLemma : public ::testing::Test {
 protected:
  struct Case {
    Eigen::MatrixXd C;
    std::size_t l1;
  };

  std::vector<Case> cases() {
    nlds::testing::Gen gen(1234);
    std::vector<Case> out;
    while (out.size() < 50) {
      const std::size_t l = gen.index(2, 6);
      Eigen::MatrixXd C = gen.coin() ? gen.coop_matrix(l, 0.05, 1.0) : gen.sparse_irreducible(l, 1.0);
      if (!is_irreducible(C)) continue;
      out.push_back({C, gen.index(1, l - 1)});
    }
    return out;
  }
};

TEST_F(MatrixLemma, TrailingBlockSitsStrictlyBelow) {
  for (const auto& [C, l1] : cases()) {
    const CoopMatrix M(C);
    EXPECT_LT(perron_bound(M.block22(l1)), perron_bound(M) - 1e-12);
  }
}

TEST_F(MatrixLemma, FixedPointIdentity) {
  for (const auto& [C, l1] : cases()) {
    const CoopMatrix M(C);
    const double s = perron_bound(M);
    const auto r = schur_reduce(M, l1, s);
    EXPECT_NEAR(perron_bound(r.matrix), s, 1e-10 * (1.0 + std::abs(s)));
  }
}

TEST_F(MatrixLemma, LargeShiftTendsToTrailingBound) {
  for (const auto& [C, l1] : cases()) {
    const CoopMatrix M(C);
    const std::vector<double> mu{1.0, 10.0, 100.0, 1000.0};
    const auto v = large_shift_limit_check(M, l1, mu);
    for (std::size_t k = 1; k < v.size(); ++k) EXPECT_LT(v[k], v[k - 1]);
    EXPECT_NEAR(v.back(), perron_bound(M.block22(l1)), 1e-2);
  }
}

TEST_F(MatrixLemma, ReductionPreservesIrreducibility) {
  for (const auto& [C, l1] : cases()) {
    const CoopMatrix M(C);
    const double gamma = perron_bound(M.block22(l1)) + 0.5;
    EXPECT_TRUE(is_irreducible(schur_reduce(M, l1, gamma).matrix));
  }
}

TEST(MatspecProperty, ReductionIsCooperativeAndDecreasing) {
  nlds::testing::Gen gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t l = gen.index(2, 6);
    const CoopMatrix M(gen.coop_matrix(l));
    const std::size_t l1 = gen.index(1, l - 1);
    const double s22 = perron_bound(M.block22(l1));
    const double g1 = s22 + gen.uniform(0.01, 1.0);
    const double g2 = g1 + gen.uniform(0.01, 1.0);
    const auto a = schur_reduce(M, l1, g1).matrix.matrix();
    const auto b = schur_reduce(M, l1, g2).matrix.matrix();
    EXPECT_TRUE(((a - b).array() >= -1e-12).all());
    EXPECT_NEAR(perron_bound(M), dense_s(M.matrix()), 1e-10);
  }
}
