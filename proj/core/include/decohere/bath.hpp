#pragma once

// Finite-mode, Fock-truncated bosonic environment.
//
// Mode k contributes omega_k a_k^H a_k to H_E and g_k^* a_k + g_k a_k^H to
// the coupling V. The continuum integrals over omega are replaced by these
// sums; any quadrature weights are folded into g_k by the caller. Mode 0 is
// the slowest tensor index of the environment basis.

#include <cstddef>
#include <optional>
#include <vector>

#include "decohere/bom.hpp"

namespace decohere {

struct BathMode {
  double omega;  // > 0
  Complex g;
};

class BathSpec {
 public:
  static constexpr Eigen::Index kMaxDimension = 64;

  /// Throws DomainError for an empty mode list, non-positive or non-finite
  /// frequencies, or fock_cutoff < 1; DimensionCapError when
  /// (fock_cutoff + 1)^modes exceeds kMaxDimension.
  BathSpec(std::vector<BathMode> modes, int fock_cutoff);

  const std::vector<BathMode>& modes() const noexcept { return modes_; }
  int fock_cutoff() const noexcept { return fock_cutoff_; }
  /// Fock levels per mode, fock_cutoff + 1.
  int levels() const noexcept { return fock_cutoff_ + 1; }
  /// Total environment dimension N.
  Eigen::Index dimension() const noexcept { return dimension_; }

 private:
  std::vector<BathMode> modes_;
  int fock_cutoff_;
  Eigen::Index dimension_;
};

/// H_int = f(sigma_z) (x) V. Since sigma_z is diagonal, f is fully described
/// by its values at +1 and -1.
struct SigmaZCoupling {
  double at_plus = 1.0;
  double at_minus = -1.0;

  QubitMatrix matrix() const;
};

/// Hermitian qubit factor M of a pure-dephasing coupling M (x) V.
class DephasingCoupling {
 public:
  /// Throws NotHermitianError if m is not Hermitian within tol::kHermitian.
  explicit DephasingCoupling(const QubitMatrix& m);
  const QubitMatrix& m() const noexcept { return m_; }

 private:
  QubitMatrix m_;
};

/// Truncated a_k: a|n> = sqrt(n)|n-1> on mode k, identity elsewhere.
/// [a, a^H] = 1 except on the top Fock level of the mode, where it equals
/// -fock_cutoff.
ComplexMatrix annihilation(const BathSpec& spec, std::size_t mode);

/// sum_k omega_k a_k^H a_k (diagonal in the Fock basis).
ComplexMatrix bath_hamiltonian(const BathSpec& spec);

/// V(g) = sum_k (g_k^* a_k + g_k a_k^H).
ComplexMatrix coupling_operator(const BathSpec& spec);

/// A(g) = sum_k (g_k^*/omega_k a_k - g_k/omega_k a_k^H), anti-Hermitian.
ComplexMatrix weyl_generator(const BathSpec& spec);

/// W(g) = exp(A(g)). Displaces a_k by -g_k / omega_k, so that
/// W H_E W^H = H_E + V + sum_k |g_k|^2/omega_k in the untruncated space.
/// Exactly unitary at every cutoff since A is anti-Hermitian; truncation only
/// spoils the displacement on the top Fock levels.
ComplexMatrix weyl_operator(const BathSpec& spec);

/// Basis indices whose occupation is below `levels` in every mode.
std::vector<Eigen::Index> low_fock_indices(const BathSpec& spec, int levels);

/// Restriction of m to rows and columns in `indices`.
ComplexMatrix restrict_to(const ComplexMatrix& m,
                          const std::vector<Eigen::Index>& indices);

struct DisplacedCheck {
  double residual_plus;   // ||P(W H_E W^H + C - H_+)P||_F
  double residual_minus;  // ||P(W^H H_E W + C - H_-)P||_F
  double c_of_g;          // fitted constant C
  int subspace_levels;    // per-mode levels kept by P
};

/// Compares H_+- = H_E +- V with the displaced forms on the low-Fock
/// subspace (ceil(fock_cutoff/2) levels per mode unless given). C is fitted
/// from the plus side as the mean diagonal offset on that subspace.
DisplacedCheck displaced_check(const BathSpec& spec,
                               std::optional<int> subspace_levels = {});

/// I_2 (x) H_E + M (x) V.
BlockOp dephasing_hamiltonian(const BathSpec& spec, const DephasingCoupling& m);

/// f(sigma_z) (x) V.
BlockOp interaction_hamiltonian(const BathSpec& spec, const SigmaZCoupling& f);

}  // namespace decohere
