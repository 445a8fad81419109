#pragma once

// 2x2 block operator matrices over H_N (+) H_N, the block form of operators
// on C^2 (x) H_N. Flattening uses the qubit index as the slow index, so
// block (i, j) occupies rows i*N.. and columns j*N.. of the dense matrix.

#include <array>

#include "decohere/numerics.hpp"

namespace decohere {

using QubitMatrix = Eigen::Matrix2cd;

namespace pauli {
QubitMatrix identity();
QubitMatrix x();
QubitMatrix y();
QubitMatrix z();
}  // namespace pauli

class BlockOp {
 public:
  /// All four blocks must be N x N for a common N >= 1.
  BlockOp(ComplexMatrix a11, ComplexMatrix a12, ComplexMatrix a21,
          ComplexMatrix a22);

  static BlockOp zero(Eigen::Index n);
  static BlockOp identity(Eigen::Index n);

  Eigen::Index dim() const noexcept { return blocks_[0].rows(); }

  /// Block (i, j) with i, j in {0, 1}.
  const ComplexMatrix& block(int i, int j) const;

  const ComplexMatrix& a11() const noexcept { return blocks_[0]; }
  const ComplexMatrix& a12() const noexcept { return blocks_[1]; }
  const ComplexMatrix& a21() const noexcept { return blocks_[2]; }
  const ComplexMatrix& a22() const noexcept { return blocks_[3]; }

  BlockOp& operator+=(const BlockOp& other);
  BlockOp& operator-=(const BlockOp& other);
  BlockOp& operator*=(Complex s);

 private:
  std::array<ComplexMatrix, 4> blocks_;
};

BlockOp operator+(BlockOp a, const BlockOp& b);
BlockOp operator-(BlockOp a, const BlockOp& b);
BlockOp operator*(const BlockOp& a, const BlockOp& b);
BlockOp operator*(Complex s, BlockOp a);

BlockOp adjoint(const BlockOp& a);

/// m (x) e, i.e. blocks a_ij = m_ij * e.
BlockOp kron_qubit_env(const QubitMatrix& m, const ComplexMatrix& e);

/// m (x) 1_N.
BlockOp embed_qubit(const QubitMatrix& m, Eigen::Index n);

/// Tr_E: [Tr a11, Tr a12; Tr a21, Tr a22].
QubitMatrix partial_trace_env(const BlockOp& a);

/// || Tr_E((a1 (x) 1) b (a2 (x) 1)) - a1 Tr_E(b) a2 ||_F
double sandwich_lemma_check(const QubitMatrix& a1, const BlockOp& b,
                            const QubitMatrix& a2);

ComplexMatrix flatten(const BlockOp& a);
BlockOp unflatten(const ComplexMatrix& m);

double frobenius_norm(const BlockOp& a);
double hermiticity_defect(const BlockOp& a);
bool is_hermitian(const BlockOp& a);

}  // namespace decohere
