#pragma once

// Operator Riccati equation  X B X + X A - C X - B^H = 0  attached to a
// Hermitian block operator R = [A B; B^H C]. A solution X makes
//   U_X = [1 -X^H; X 1]
// block-diagonalize R:  U_X^{-1} R U_X = diag(A + B X, C - B^H X^H).

#include <optional>
#include <string_view>
#include <vector>

#include "decohere/bath.hpp"
#include "decohere/bom.hpp"

namespace decohere {

struct RiccatiSettings {
  int max_newton_iters = 100;
  double tol_residual = 1e-12;
  /// Zero when empty.
  std::optional<ComplexMatrix> initial_guess;
  /// Scale each Newton step to minimize the residual along its direction.
  bool line_search = true;
};

struct RiccatiProblem {
  ComplexMatrix a;
  ComplexMatrix b;
  ComplexMatrix c;
  RiccatiSettings settings;

  /// A = h11, B = h12, C = h22. Throws NotHermitianError unless h is.
  static RiccatiProblem from_block(const BlockOp& h,
                                   RiccatiSettings settings = {});

  Eigen::Index dim() const noexcept { return a.rows(); }
  /// Throws ShapeError on inconsistent shapes.
  void validate() const;
  /// [A B; B^H C]
  BlockOp block() const;
};

enum class RiccatiMethod {
  newton,
  invariant_subspace,
  scalar_quadratic,
  closed_form_time_dependent,
};

std::string_view to_string(RiccatiMethod m);

/// ||X B X + X A - C X - B^H||_F
double residual(const RiccatiProblem& p, const ComplexMatrix& x);

class RiccatiSolution {
 public:
  /// The residual is always recomputed from x here.
  RiccatiSolution(const RiccatiProblem& p, ComplexMatrix x,
                  RiccatiMethod method, int iterations,
                  std::vector<double> residual_trace = {});

  const ComplexMatrix& x() const noexcept { return x_; }
  double residual() const noexcept { return residual_; }
  RiccatiMethod method() const noexcept { return method_; }
  int iterations() const noexcept { return iterations_; }
  const std::vector<double>& residual_trace() const noexcept {
    return residual_trace_;
  }

 private:
  ComplexMatrix x_;
  double residual_;
  RiccatiMethod method_;
  int iterations_;
  std::vector<double> residual_trace_;
};

/// Newton's method on F(X) = XBX + XA - CX - B^H. Each step solves the
/// Sylvester equation  D (A + B X) + (X B - C) D = -F(X). With line search
/// enabled the update is X + t D where t in (0, 2] minimizes
/// ||(1 - t) F(X) + t^2 D B D||_F, which is F(X + t D) exactly.
///
/// Throws SingularError if a Newton step is singular and
/// NonConvergenceError when max_newton_iters is exhausted.
RiccatiSolution solve_newton(const RiccatiProblem& p);

/// Which N-dimensional spectral subspace of R to use.
class SpectralSelector {
 public:
  enum class Kind { lower, upper, indices, matching };

  static SpectralSelector lower() { return SpectralSelector(Kind::lower); }
  static SpectralSelector upper() { return SpectralSelector(Kind::upper); }
  /// Explicit eigenvalue positions in ascending order.
  static SpectralSelector indices(std::vector<Eigen::Index> idx);
  /// Eigenvalues of R nearest to `targets`, one each.
  static SpectralSelector matching(std::vector<double> targets);

  Kind kind() const noexcept { return kind_; }
  const std::vector<Eigen::Index>& index_list() const noexcept {
    return indices_;
  }
  const std::vector<double>& targets() const noexcept { return targets_; }

 private:
  explicit SpectralSelector(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<Eigen::Index> indices_;
  std::vector<double> targets_;
};

/// X = Y2 Y1^{-1} from the selected eigenvectors [Y1; Y2] of R.
///
/// Throws AmbiguousSubspaceError if a selected eigenvalue is degenerate with
/// an unselected one, and NoGraphRepresentationError if cond(Y1) > 1e12.
RiccatiSolution solve_invariant_subspace(
    const RiccatiProblem& p,
    const SpectralSelector& which = SpectralSelector::lower());

/// Spectrum of A + B X, computed as the eigenvalues of R compressed onto the
/// orthonormalized graph subspace of X. Ascending.
RealVector branch_eigenvalues(const RiccatiProblem& p, const ComplexMatrix& x);

/// [1 -X^H; X 1]
BlockOp build_ux(const ComplexMatrix& x);

/// Exact inverse of U_X, diag((1 + X^H X)^{-1}, (1 + X X^H)^{-1}) U_X^H.
BlockOp inverse_ux(const ComplexMatrix& x);

/// 2-norm condition number of U_X.
double condition_ux(const ComplexMatrix& x);

struct Diagonalization {
  ComplexMatrix diag_plus;   // A + B X
  ComplexMatrix diag_minus;  // C - B^H X^H
  double offdiag_residual;   // Frobenius norm of both off-diagonal blocks
  double cond_ux;
};

Diagonalization diagonalize(const BlockOp& h, const ComplexMatrix& x);
Diagonalization diagonalize(const BlockOp& h, const RiccatiSolution& sol);

struct DephasingRoots {
  Complex principal;  // |x| <= 1
  Complex other;      // -1 / conj(principal)
};

/// Roots of m12 x^2 + (m11 - m22) x - conj(m12) = 0. For m12 = 0 both roots
/// are reported as 0, since the block operator is already diagonal.
DephasingRoots solve_dephasing_quadratic(const DephasingCoupling& m);

/// Riccati problem of I_2 (x) H_E + M (x) V.
RiccatiProblem dephasing_problem(const BathSpec& spec,
                                 const DephasingCoupling& m);

/// z_t = exp(-2 i alpha t)
Complex z_of_t(double alpha, double t);

/// H_t = [H_E, conj(z_t)(V + beta); z_t (V + beta), H_E]
BlockOp periodic_hamiltonian(const BathSpec& spec, double beta, double alpha,
                             double t);

/// S_t = U_{z_t} / sqrt(2) as a qubit factor.
QubitMatrix s_transform(double alpha, double t);

/// ||F(z_t 1)|| for the Riccati equation of H_t.
double time_dependent_residual(const BathSpec& spec, double beta,
                               double alpha, double t);

}  // namespace decohere
