#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

#include "ddae/errors.hpp"
#include "ddae/system_model.hpp"
#include "oracle.hpp"

namespace {

using ddae::Matrix;

Matrix orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Matrix M(n, n);
  for (int i = 0; i < n * n; ++i) M.data()[i] = g(rng);
  return Eigen::HouseholderQR<Matrix>(M).householderQ() * Matrix::Identity(n, n);
}

double orthogonality_residual(const Matrix& Q) {
  return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm();
}

ddae::DdaeSystem algebraic_only(const Matrix& A0) {
  const auto n = A0.rows();
  return ddae::DdaeSystem(Matrix::Zero(n, n), {A0}, Matrix::Ones(n, 1), Matrix::Ones(1, n), {});
}

TEST(DdaeSystem, RejectsInconsistentShapes) {
  const Matrix I2 = Matrix::Identity(2, 2);
  EXPECT_THROW(ddae::DdaeSystem(I2, {Matrix::Identity(3, 3)}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}),
               ddae::DimensionError);
  EXPECT_THROW(ddae::DdaeSystem(I2, {I2}, Matrix::Ones(3, 1), Matrix::Ones(1, 2), {}), ddae::DimensionError);
  EXPECT_THROW(ddae::DdaeSystem(I2, {I2}, Matrix::Ones(2, 1), Matrix::Ones(1, 3), {}), ddae::DimensionError);
  EXPECT_THROW(ddae::DdaeSystem(I2, {I2, I2}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}), ddae::DimensionError);
  EXPECT_THROW(ddae::DdaeSystem(Matrix::Ones(2, 3), {I2}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}),
               ddae::DimensionError);
}

TEST(DdaeSystem, RejectsNonPositiveDelays) {
  const Matrix I2 = Matrix::Identity(2, 2);
  for (double bad : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()}) {
    EXPECT_THROW(ddae::DdaeSystem(I2, {I2, I2}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {bad}), ddae::DimensionError)
        << bad;
  }
}

TEST(DdaeSystem, WithDelaysKeepsMatrices) {
  const auto sys = oracle::sys_family(0.25);
  const auto moved = sys.with_delays({0.99, 2.0});
  EXPECT_EQ(moved.delays(), (ddae::Delays{0.99, 2.0}));
  EXPECT_EQ(moved.A(1), sys.A(1));
  EXPECT_THROW(sys.with_delays({1.0}), ddae::DimensionError);
}

TEST(Canonicalize, SortsMergesAndFoldsZeroDelays) {
  const Matrix E = Matrix::Identity(1, 1);
  const Matrix a0 = Matrix::Constant(1, 1, -3.0);
  const Matrix a = Matrix::Constant(1, 1, 1.0), b = Matrix::Constant(1, 1, 2.0), c = Matrix::Constant(1, 1, 4.0),
               z = Matrix::Constant(1, 1, 0.5);
  const auto sys = ddae::canonicalize(E, {a0, a, b, c, z}, Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                                      {2.0, 1.0, 2.0 + 1e-13, 0.0});
  ASSERT_EQ(sys.m(), 2);
  EXPECT_EQ(sys.delays()[0], 1.0);
  EXPECT_NEAR(sys.delays()[1], 2.0, 1e-12);
  EXPECT_EQ(sys.A(0)(0, 0), -2.5);  // zero delay folded into A_0
  EXPECT_EQ(sys.A(1)(0, 0), 2.0);
  EXPECT_EQ(sys.A(2)(0, 0), 5.0);  // 1 + 4 merged
  EXPECT_THROW(ddae::canonicalize(E, {a0, a}, Matrix::Ones(1, 1), Matrix::Ones(1, 1), {-1.0}), ddae::DimensionError);
}

TEST(NullspaceBases, ZeroMatrixIsAllNullspace) {
  const auto nb = ddae::nullspace_bases(Matrix::Zero(2, 2));
  EXPECT_EQ(nb.rank, 0);
  EXPECT_EQ(nb.nu(), 2);
  EXPECT_EQ(nb.Uperp.cols(), 0);
  EXPECT_EQ(nb.Vperp.cols(), 0);
  EXPECT_LT(orthogonality_residual(nb.U), 1e-14);
  EXPECT_LT(orthogonality_residual(nb.V), 1e-14);
}

TEST(NullspaceBases, IdentityHasNoNullspace) {
  const auto nb = ddae::nullspace_bases(Matrix::Identity(2, 2));
  EXPECT_EQ(nb.rank, 2);
  EXPECT_EQ(nb.U.cols(), 0);
  EXPECT_EQ(nb.V.cols(), 0);
  EXPECT_LT(orthogonality_residual(nb.Uperp), 1e-14);
}

TEST(NullspaceBases, SingularDiagonal) {
  Matrix E(2, 2);
  E << 1, 0, 0, 0;
  const auto nb = ddae::nullspace_bases(E);
  ASSERT_EQ(nb.nu(), 1);
  EXPECT_NEAR(std::abs(nb.U(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(nb.V(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(nb.Uperp(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(nb.Vperp(0, 0)), 1.0, 1e-15);
  EXPECT_LT((nb.U.transpose() * E).norm(), 1e-15);
  EXPECT_LT((E * nb.V).norm(), 1e-15);
}

TEST(NullspaceBases, RejectsNonSquare) {
  EXPECT_THROW(ddae::nullspace_bases(Matrix::Ones(2, 3)), ddae::DimensionError);
}

// Singular values exactly at the tolerance count toward the rank.
TEST(NullspaceBases, RankToleranceBoundaryCountsTowardRank) {
  Matrix E = Matrix::Zero(2, 2);
  E(0, 0) = 1.0;
  E(1, 1) = 0.5;
  EXPECT_EQ(ddae::nullspace_bases(E, 0.5).rank, 2);
  EXPECT_EQ(ddae::nullspace_bases(E, 0.5000001).rank, 1);
}

TEST(NullspaceBases, RandomKnownRankProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sv(0.5, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const int r = trial % n;
    Matrix S = Matrix::Zero(n, n);
    for (int i = 0; i < r; ++i) S(i, i) = sv(rng);
    const Matrix P = orthogonal(rng, n), Q = orthogonal(rng, n);
    const Matrix E = P * S * Q;
    const auto nb = ddae::nullspace_bases(E);
    ASSERT_EQ(nb.rank, r);
    ASSERT_EQ(nb.nu(), n - r);
    const double tol = 1e-10 * std::max(1.0, E.norm());
    EXPECT_LT((nb.U.transpose() * E).norm(), tol);
    EXPECT_LT((E * nb.V).norm(), tol);
    Matrix UU(n, n), VV(n, n);
    UU << nb.Uperp, nb.U;
    VV << nb.Vperp, nb.V;
    EXPECT_LT(orthogonality_residual(UU), 1e-12);
    EXPECT_LT(orthogonality_residual(VV), 1e-12);
    // Congruence: [Uperp U]^T E [Vperp V] = diag(E11, 0).
    const Matrix G = UU.transpose() * E * VV;
    EXPECT_LT(G.bottomRows(n - r).norm() + G.rightCols(n - r).norm(), tol);
  }
}

TEST(Decompose, SysABlocks) {
  const auto dec = ddae::decompose(oracle::sys_family(0.25));
  ASSERT_EQ(dec.nu(), 1);
  ASSERT_EQ(dec.m(), 2);
  EXPECT_NEAR(std::abs(dec.A22[0](0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(dec.B2(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(dec.C2(0, 0)), 1.0, 1e-15);
  // Basis signs cancel in -C2 A22[0]^{-1} B2 = 1.
  EXPECT_NEAR(-dec.C2(0, 0) * dec.B2(0, 0) / dec.A22[0](0, 0), 1.0, 1e-15);
  // With the signs normalized, U^T A_0 V = -1 exactly as written.
  const double su = dec.bases.U(1, 0), sv = dec.bases.V(1, 0);
  EXPECT_NEAR(dec.A22[0](0, 0) * su * sv, -1.0, 1e-15);
  EXPECT_NEAR(dec.A22[1](0, 0) * su * sv, 0.25, 1e-15);
  EXPECT_NEAR(dec.A22[2](0, 0) * su * sv, -0.5, 1e-15);
}

TEST(Decompose, BlocksMatchDefinition) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_stable_instance(rng);
    const auto& sys = inst.system;
    const auto dec = ddae::decompose(sys);
    const auto& b = dec.bases;
    EXPECT_EQ(dec.nu(), sys.n() - inst.rank);
    EXPECT_LT((dec.E11 - b.Uperp.transpose() * sys.E() * b.Vperp).norm(), 1e-14);
    for (int i = 0; i <= sys.m(); ++i) {
      const Matrix& A = sys.A(i);
      const auto k = static_cast<std::size_t>(i);
      EXPECT_LT((dec.A11[k] - b.Uperp.transpose() * A * b.Vperp).norm(), 1e-13);
      EXPECT_LT((dec.A12[k] - b.Uperp.transpose() * A * b.V).norm(), 1e-13);
      EXPECT_LT((dec.A21[k] - b.U.transpose() * A * b.Vperp).norm(), 1e-13);
      EXPECT_LT((dec.A22[k] - b.U.transpose() * A * b.V).norm(), 1e-13);
    }
    EXPECT_LT((dec.B1 - b.Uperp.transpose() * sys.B()).norm(), 1e-13);
    EXPECT_LT((dec.B2 - b.U.transpose() * sys.B()).norm(), 1e-13);
    EXPECT_LT((dec.C1 - sys.C() * b.Vperp).norm(), 1e-13);
    EXPECT_LT((dec.C2 - sys.C() * b.V).norm(), 1e-13);
  }
}

TEST(Decompose, OdeHasEmptyAlgebraicBlocks) {
  const Matrix I3 = Matrix::Identity(3, 3);
  const ddae::DdaeSystem ode(I3, {-I3, 0.1 * I3}, Matrix::Ones(3, 1), Matrix::Ones(1, 3), {1.0});
  const auto dec = ddae::decompose(ode);
  EXPECT_EQ(dec.nu(), 0);
  for (const auto& blocks : {dec.A12, dec.A21, dec.A22}) {
    for (const Matrix& M : blocks) EXPECT_EQ(M.size(), 0);
  }
  EXPECT_EQ(dec.B2.rows(), 0);
  EXPECT_EQ(dec.C2.cols(), 0);
  const auto a1 = ddae::check_assumption1(dec);
  EXPECT_TRUE(a1.ok);
  EXPECT_TRUE(std::isinf(a1.margin));
  EXPECT_EQ(ddae::check_difference_stability(dec, 16), 0.0);
}

TEST(Decompose, PureAlgebraicSystem) {
  const auto dec = ddae::decompose(algebraic_only(Matrix::Identity(2, 2)));
  EXPECT_EQ(dec.nu(), 2);
  EXPECT_EQ(dec.E11.size(), 0);
  const Matrix G = dec.A22[0].transpose() * dec.A22[0];
  EXPECT_LT((G - Matrix::Identity(2, 2)).norm(), 1e-14);  // orthogonally similar to I
  const auto a1 = ddae::check_assumption1(dec);
  EXPECT_TRUE(a1.ok);
  EXPECT_NEAR(a1.margin, 1.0, 1e-14);
}

TEST(Assumption1, Examples) {
  const auto a = ddae::check_assumption1(ddae::decompose(oracle::sys_family(0.25)));
  EXPECT_TRUE(a.ok);
  EXPECT_NEAR(a.margin, 1.0, 1e-15);

  const auto z = ddae::check_assumption1(ddae::decompose(algebraic_only(Matrix::Zero(2, 2))));
  EXPECT_FALSE(z.ok);
  EXPECT_EQ(z.margin, 0.0);
}

TEST(Assumption1, MarginInvariantUnderOrthogonalChangeOfBasis) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = oracle::random_stable_instance(rng);
    const auto& sys = inst.system;
    const Matrix P = orthogonal(rng, sys.n()), Q = orthogonal(rng, sys.n());
    std::vector<Matrix> A;
    for (const Matrix& Ai : sys.A()) A.push_back(P * Ai * Q);
    const ddae::DdaeSystem moved(P * sys.E() * Q, A, P * sys.B(), sys.C() * Q, sys.delays());
    const double m0 = ddae::check_assumption1(ddae::decompose(sys)).margin;
    const double m1 = ddae::check_assumption1(ddae::decompose(moved)).margin;
    EXPECT_NEAR(m0, m1, 1e-12 * m0);
  }
}

TEST(DifferenceStability, Examples) {
  EXPECT_NEAR(ddae::check_difference_stability(ddae::decompose(oracle::sys_family(0.25)), 400), 0.75, 1e-12);
  EXPECT_NEAR(ddae::check_difference_stability(ddae::decompose(oracle::sys_family(1.0 / 16.0)), 400), 0.5625, 1e-12);
  const auto no_delay = algebraic_only(Matrix::Identity(2, 2));
  EXPECT_EQ(ddae::check_difference_stability(ddae::decompose(no_delay), 400), 0.0);
}

TEST(DifferenceStability, RequiresAssumption1) {
  const Matrix Z = Matrix::Zero(2, 2);
  const ddae::DdaeSystem bad(Z, {Z, Matrix::Identity(2, 2)}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {1.0});
  EXPECT_THROW(ddae::check_difference_stability(ddae::decompose(bad), 16), ddae::PreconditionError);
}

TEST(DifferenceStability, MonotoneUnderGridDoubling) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 8; ++trial) {
    const auto inst = oracle::random_stable_instance(rng);
    const auto dec = ddae::decompose(inst.system);
    double prev = 0.0;
    for (int N : {4, 8, 16, 32, 64}) {
      const double g = ddae::check_difference_stability(dec, N);
      EXPECT_GE(g, prev - 1e-14);
      EXPECT_LE(g, inst.gamma_bound + 1e-12);
      prev = g;
    }
  }
}

TEST(DifferenceStability, DefaultGridSizes) {
  EXPECT_EQ(ddae::default_grid_per_dim(1), 400);
  EXPECT_EQ(ddae::default_grid_per_dim(2), 400);
  EXPECT_EQ(ddae::default_grid_per_dim(3), 64);
  EXPECT_EQ(ddae::default_grid_per_dim(4), 16);
  EXPECT_THROW(ddae::default_grid_per_dim(5), ddae::PreconditionError);
}

TEST(Validate, ReportsForExamples) {
  const auto ra = ddae::validate(oracle::sys_family(0.25));
  EXPECT_EQ(ra.rank_E, 1);
  EXPECT_TRUE(ra.assumption1_ok);
  EXPECT_NEAR(ra.difference_stability_margin, 0.75, 1e-12);
  EXPECT_TRUE(ra.passed());

  const auto rz = ddae::validate(algebraic_only(Matrix::Zero(2, 2)));
  EXPECT_FALSE(rz.assumption1_ok);
  EXPECT_TRUE(std::isnan(rz.difference_stability_margin));
  EXPECT_FALSE(rz.passed());
  EXPECT_FALSE(rz.messages.empty());

  const Matrix I2 = Matrix::Identity(2, 2);
  const auto ro = ddae::validate(ddae::DdaeSystem(I2, {-I2}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}));
  EXPECT_TRUE(ro.passed());
  ASSERT_FALSE(ro.messages.empty());
  EXPECT_NE(ro.messages.front().find("vacuous"), std::string::npos);
}

TEST(Validate, FlagsUnstableDifferencePart) {
  auto sys = oracle::sys_family(0.75);  // gamma_a = 1.25
  const auto r = ddae::validate(sys);
  EXPECT_TRUE(r.assumption1_ok);
  EXPECT_NEAR(r.difference_stability_margin, 1.25, 1e-12);
  EXPECT_FALSE(r.passed());
}

TEST(ImaginaryAxisScan, SysAStaysAwayFromZero) {
  const auto sys = oracle::sys_family(0.25);
  std::vector<double> w;
  for (int k = 0; k <= 1000; ++k) w.push_back(0.01 * k);
  const auto scan = ddae::imaginary_axis_scan(sys, sys.delays(), w);
  EXPECT_GT(scan.min_sigma, 1e-3);
  // A pure integrator x' = w has its root at 0.
  const Matrix one = Matrix::Identity(1, 1);
  const ddae::DdaeSystem integ(one, {Matrix::Zero(1, 1)}, one, one, {});
  EXPECT_NEAR(ddae::imaginary_axis_scan(integ, {}, w).min_sigma, 0.0, 1e-15);
}

}  // namespace
