#pragma once

// Dense complex linear algebra on small operators: products, adjoints,
// norms, the matrix exponential, Hermitian eigendecomposition and the
// Sylvester solve used by the Riccati Newton step.

#include <complex>

#include <Eigen/Dense>

namespace decohere {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
/// Relative Hermiticity tolerance (times ||a||_F).
inline constexpr double kHermitian = 1e-10;
inline constexpr double kEigen = 1e-11;
inline constexpr double kSylvester = 1e-10;
}  // namespace tol

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);

/// exp(scale * a) by scaling and squaring with a degree <= 13 Padé
/// approximant, Higham (2005) parameters.
ComplexMatrix expm(const ComplexMatrix& a, Complex scale = 1.0);

struct HermitianEig {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors;  // columns, unitary
};

/// Cyclic complex Jacobi. Rejects inputs further than kHermitian*||a||_F
/// from Hermitian.
HermitianEig hermitian_eig(const ComplexMatrix& a);

/// Solves delta * p + q * delta = r through the Kronecker-linearized system
///   (p^T (x) I + I (x) q) vec(delta) = vec(r)
/// with a dense partially pivoted LU. Throws SingularError when the spectra
/// of p and -q (numerically) intersect.
ComplexMatrix solve_sylvester(const ComplexMatrix& p, const ComplexMatrix& q,
                              const ComplexMatrix& r);

double frobenius_norm(const ComplexMatrix& a);

/// Largest singular value, from the top eigenvalue of a^H a.
double operator_norm_estimate(const ComplexMatrix& a);

/// ||a - a^H||_F.
double hermiticity_defect(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);

ComplexMatrix identity(Eigen::Index n);

}  // namespace decohere
