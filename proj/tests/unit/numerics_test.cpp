#include "decohere/numerics.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "decohere/bom.hpp"
#include "decohere/errors.hpp"
#include "test_util.hpp"

namespace decohere {
namespace {

using testing::Rng;

TEST(Matmul, IdentityAndPauliAlgebra) {
  Rng rng(1);
  const ComplexMatrix m = rng.matrix(2, 2);
  EXPECT_EQ(matmul(identity(2), m), m);
  EXPECT_LT((matmul(pauli::x(), pauli::y()) - kI * ComplexMatrix(pauli::z()))
                .norm(),
            1e-15);
}

TEST(Matmul, MatchesTripleLoop) {
  Rng rng(2);
  const ComplexMatrix a = rng.matrix(3, 3);
  const ComplexMatrix b = rng.matrix(3, 3);
  EXPECT_LT((matmul(a, b) - testing::triple_loop_product(a, b)).norm(), 1e-13);
}

TEST(Matmul, RejectsShapeMismatch) {
  EXPECT_THROW(matmul(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(2, 3)),
               ShapeError);
}

TEST(Adjoint, Examples) {
  EXPECT_EQ(adjoint(pauli::y()), ComplexMatrix(pauli::y()));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = kI;
  d(1, 1) = -kI;
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = -kI;
  expected(1, 1) = kI;
  EXPECT_EQ(adjoint(d), expected);

  Rng rng(3);
  const ComplexMatrix a = rng.matrix(2, 3);
  const ComplexMatrix at = adjoint(a);
  ASSERT_EQ(at.rows(), 3);
  ASSERT_EQ(at.cols(), 2);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(at(j, i), std::conj(a(i, j)));
  EXPECT_EQ(adjoint(at), a);
}

TEST(Expm, ZeroAndDiagonal) {
  EXPECT_LT((expm(ComplexMatrix::Zero(4, 4), 2.0) - identity(4)).norm(), 1e-16);
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = -2.0;
  d(2, 2) = 7.0;
  const Complex s(0.3, -1.1);
  const ComplexMatrix e = expm(d, s);
  for (int k = 0; k < 3; ++k)
    EXPECT_LT(std::abs(e(k, k) - std::exp(s * d(k, k))),
              1e-13 * std::abs(std::exp(s * d(k, k))));
  EXPECT_LT((e - ComplexMatrix(e.diagonal().asDiagonal())).norm(), 1e-14);
}

TEST(Expm, MatchesEigendecompositionOnHermitian) {
  Rng rng(4);
  for (Eigen::Index n : {2, 5, 8, 16}) {
    const ComplexMatrix h = rng.hermitian(n);
    for (double t : {0.01, 0.7, 3.0, 12.0}) {
      const ComplexMatrix oracle = testing::eig_exp(h, t);
      EXPECT_LT((expm(h, Complex(0.0, -t)) - oracle).norm(), 1e-11)
          << "n=" << n << " t=" << t;
    }
  }
}

TEST(Expm, RejectsNonSquare) {
  EXPECT_THROW(expm(ComplexMatrix::Zero(2, 3)), ShapeError);
}

TEST(Expm, UnitaryForLargeArguments) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix h = rng.hermitian(6);
    h /= operator_norm_estimate(h);
    const double t = rng.uniform(-100.0, 100.0);
    const ComplexMatrix u = expm(h, Complex(0.0, -t));
    EXPECT_LT((u.adjoint() * u - identity(6)).norm(), 1e-10) << "t=" << t;
  }
}

TEST(Expm, SemigroupProperty) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = rng.hermitian(5);
    const double t = rng.uniform(-3.0, 3.0);
    const double s = rng.uniform(-3.0, 3.0);
    const ComplexMatrix lhs = expm(h, Complex(0.0, -(t + s)));
    const ComplexMatrix rhs =
        expm(h, Complex(0.0, -t)) * expm(h, Complex(0.0, -s));
    EXPECT_LT((lhs - rhs).norm(), 1e-10);
  }
}

TEST(HermitianEig, PauliMatrices) {
  const HermitianEig z = hermitian_eig(pauli::z());
  EXPECT_NEAR(z.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(z.eigenvalues(1), 1.0, 1e-15);

  const HermitianEig x = hermitian_eig(pauli::x());
  EXPECT_NEAR(x.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(x.eigenvalues(1), 1.0, 1e-15);
  // Eigenvectors up to phase: (1, -1)/sqrt2 and (1, 1)/sqrt2.
  const Eigen::Vector2cd minus(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  const Eigen::Vector2cd plus(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(std::abs(minus.dot(x.eigenvectors.col(0))), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(plus.dot(x.eigenvectors.col(1))), 1.0, 1e-14);
}

TEST(HermitianEig, RandomReconstruction) {
  Rng rng(7);
  for (Eigen::Index n : {1, 2, 6, 13, 24}) {
    const ComplexMatrix a = rng.hermitian(n);
    const HermitianEig e = hermitian_eig(a);
    const ComplexMatrix& v = e.eigenvectors;
    const ComplexMatrix lam = e.eigenvalues.cast<Complex>().asDiagonal();
    EXPECT_LE((a * v - v * lam).norm(), 1e-11 * a.norm()) << "n=" << n;
    EXPECT_LE((v.adjoint() * v - identity(n)).norm(), 1e-11) << "n=" << n;
    for (Eigen::Index k = 1; k < n; ++k)
      EXPECT_LE(e.eigenvalues(k - 1), e.eigenvalues(k));
    if (n == 6)
      EXPECT_LT((a - v * lam * v.adjoint()).norm(), 1e-12 * a.norm());
  }
}

TEST(HermitianEig, DegenerateSpectrum) {
  Rng rng(8);
  const ComplexMatrix q = rng.matrix(5, 5).householderQr().householderQ();
  RealVector d(5);
  d << 1.0, 1.0, 1.0, -2.0, -2.0;
  const ComplexMatrix a = q * d.cast<Complex>().asDiagonal() * q.adjoint();
  const HermitianEig e = hermitian_eig(0.5 * (a + a.adjoint()));
  EXPECT_NEAR(e.eigenvalues(0), -2.0, 1e-13);
  EXPECT_NEAR(e.eigenvalues(4), 1.0, 1e-13);
}

TEST(HermitianEig, RejectsNonHermitian) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eig(a), NotHermitianError);
}

TEST(Sylvester, ScalarAndDiagonalCases) {
  ComplexMatrix p(1, 1), q(1, 1), r(1, 1);
  p << 2.0;
  q << 3.0;
  r << 10.0;
  EXPECT_NEAR(std::abs(solve_sylvester(p, q, r)(0, 0) - 2.0), 0.0, 1e-15);

  Rng rng(9);
  ComplexMatrix pd = ComplexMatrix::Zero(3, 3);
  pd.diagonal() << 2.0, Complex(0.0, -1.5), 4.0;
  const ComplexMatrix rr = rng.matrix(3, 3);
  const ComplexMatrix delta = solve_sylvester(pd, ComplexMatrix::Zero(3, 3), rr);
  EXPECT_LT((delta - rr * pd.inverse()).norm(), 1e-14);
}

TEST(Sylvester, RectangularShape) {
  Rng rng(10);
  const ComplexMatrix p = rng.matrix(3, 3) + 5.0 * identity(3);
  const ComplexMatrix q = rng.matrix(2, 2) + 5.0 * identity(2);
  const ComplexMatrix r = rng.matrix(2, 3);
  const ComplexMatrix delta = solve_sylvester(p, q, r);
  EXPECT_LT((delta * p + q * delta - r).norm(), 1e-12);
  EXPECT_THROW(solve_sylvester(p, q, rng.matrix(3, 2)), ShapeError);
}

TEST(Sylvester, MatchesKroneckerOracleUpToDimensionEight) {
  Rng rng(11);
  for (Eigen::Index n = 1; n <= 8; ++n) {
    const ComplexMatrix p = rng.matrix(n, n) + 4.0 * identity(n);
    const ComplexMatrix q = rng.matrix(n, n) + 4.0 * identity(n);
    const ComplexMatrix r = rng.matrix(n, n);
    const ComplexMatrix delta = solve_sylvester(p, q, r);
    const ComplexMatrix oracle = testing::kron_sylvester(p, q, r);
    EXPECT_LT((delta - oracle).norm(), 1e-10) << "n=" << n;
    EXPECT_LE((delta * p + q * delta - r).norm(),
              tol::kSylvester * (p.norm() + q.norm()) * delta.norm());
  }
}

TEST(Sylvester, SingularSystemIsRejected) {
  // p and -q share the eigenvalue 1.
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p.diagonal() << 1.0, 3.0;
  ComplexMatrix q = ComplexMatrix::Zero(2, 2);
  q.diagonal() << -1.0, 5.0;
  EXPECT_THROW(solve_sylvester(p, q, identity(2)), SingularError);
}

TEST(Norms, Examples) {
  EXPECT_NEAR(frobenius_norm(identity(7)), std::sqrt(7.0), 1e-15);
  EXPECT_EQ(frobenius_norm(ComplexMatrix::Zero(3, 3)), 0.0);
  EXPECT_EQ(operator_norm_estimate(ComplexMatrix::Zero(3, 3)), 0.0);

  Rng rng(12);
  const ComplexMatrix a = rng.matrix(5, 5);
  const Eigen::JacobiSVD<ComplexMatrix> svd(a);
  EXPECT_NEAR(operator_norm_estimate(a), svd.singularValues()(0), 1e-12);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) sum += std::norm(a(i, j));
  EXPECT_NEAR(frobenius_norm(a), std::sqrt(sum), 1e-13);
}

}  // namespace
}  // namespace decohere
