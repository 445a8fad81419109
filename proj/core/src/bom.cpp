#include "decohere/bom.hpp"

#include <cmath>
#include <string>

#include "decohere/errors.hpp"

namespace decohere {

namespace pauli {
QubitMatrix identity() { return QubitMatrix::Identity(); }
QubitMatrix x() {
  QubitMatrix m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
QubitMatrix y() {
  QubitMatrix m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}
QubitMatrix z() {
  QubitMatrix m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

BlockOp::BlockOp(ComplexMatrix a11, ComplexMatrix a12, ComplexMatrix a21,
                 ComplexMatrix a22)
    : blocks_{std::move(a11), std::move(a12), std::move(a21), std::move(a22)} {
  const Eigen::Index n = blocks_[0].rows();
  if (n < 1) throw ShapeError("BlockOp: empty blocks");
  for (const auto& b : blocks_) {
    if (b.rows() != n || b.cols() != n)
      throw ShapeError("BlockOp: all blocks must be " + std::to_string(n) +
                       "x" + std::to_string(n));
  }
}

BlockOp BlockOp::zero(Eigen::Index n) {
  const ComplexMatrix z = ComplexMatrix::Zero(n, n);
  return BlockOp(z, z, z, z);
}

BlockOp BlockOp::identity(Eigen::Index n) {
  const ComplexMatrix z = ComplexMatrix::Zero(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return BlockOp(id, z, z, id);
}

const ComplexMatrix& BlockOp::block(int i, int j) const {
  if (i < 0 || i > 1 || j < 0 || j > 1)
    throw ShapeError("BlockOp::block: index out of range");
  return blocks_[static_cast<std::size_t>(2 * i + j)];
}

BlockOp& BlockOp::operator+=(const BlockOp& other) {
  if (other.dim() != dim()) throw ShapeError("BlockOp: dimension mismatch");
  for (std::size_t k = 0; k < 4; ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

BlockOp& BlockOp::operator-=(const BlockOp& other) {
  if (other.dim() != dim()) throw ShapeError("BlockOp: dimension mismatch");
  for (std::size_t k = 0; k < 4; ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

BlockOp& BlockOp::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

BlockOp operator+(BlockOp a, const BlockOp& b) { return a += b; }
BlockOp operator-(BlockOp a, const BlockOp& b) { return a -= b; }
BlockOp operator*(Complex s, BlockOp a) { return a *= s; }

BlockOp operator*(const BlockOp& a, const BlockOp& b) {
  if (a.dim() != b.dim()) throw ShapeError("BlockOp: dimension mismatch");
  return BlockOp(a.a11() * b.a11() + a.a12() * b.a21(),
                 a.a11() * b.a12() + a.a12() * b.a22(),
                 a.a21() * b.a11() + a.a22() * b.a21(),
                 a.a21() * b.a12() + a.a22() * b.a22());
}

BlockOp adjoint(const BlockOp& a) {
  return BlockOp(a.a11().adjoint(), a.a21().adjoint(), a.a12().adjoint(),
                 a.a22().adjoint());
}

BlockOp kron_qubit_env(const QubitMatrix& m, const ComplexMatrix& e) {
  if (e.rows() != e.cols() || e.rows() < 1)
    throw ShapeError("kron_qubit_env: environment operator must be square");
  return BlockOp(m(0, 0) * e, m(0, 1) * e, m(1, 0) * e, m(1, 1) * e);
}

BlockOp embed_qubit(const QubitMatrix& m, Eigen::Index n) {
  return kron_qubit_env(m, ComplexMatrix::Identity(n, n));
}

QubitMatrix partial_trace_env(const BlockOp& a) {
  QubitMatrix out;
  out << a.a11().trace(), a.a12().trace(), a.a21().trace(), a.a22().trace();
  return out;
}

double sandwich_lemma_check(const QubitMatrix& a1, const BlockOp& b,
                            const QubitMatrix& a2) {
  const Eigen::Index n = b.dim();
  const BlockOp lhs = embed_qubit(a1, n) * b * embed_qubit(a2, n);
  return (partial_trace_env(lhs) - a1 * partial_trace_env(b) * a2).norm();
}

ComplexMatrix flatten(const BlockOp& a) {
  const Eigen::Index n = a.dim();
  ComplexMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a.a11();
  m.topRightCorner(n, n) = a.a12();
  m.bottomLeftCorner(n, n) = a.a21();
  m.bottomRightCorner(n, n) = a.a22();
  return m;
}

BlockOp unflatten(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw ShapeError("unflatten: need a square matrix of even dimension, got " +
                     std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  const Eigen::Index n = m.rows() / 2;
  return BlockOp(m.topLeftCorner(n, n), m.topRightCorner(n, n),
                 m.bottomLeftCorner(n, n), m.bottomRightCorner(n, n));
}

double frobenius_norm(const BlockOp& a) {
  return std::sqrt(a.a11().squaredNorm() + a.a12().squaredNorm() +
                   a.a21().squaredNorm() + a.a22().squaredNorm());
}

double hermiticity_defect(const BlockOp& a) {
  return std::sqrt((a.a11() - a.a11().adjoint()).squaredNorm() +
                   (a.a22() - a.a22().adjoint()).squaredNorm() +
                   2.0 * (a.a21() - a.a12().adjoint()).squaredNorm());
}

bool is_hermitian(const BlockOp& a) {
  return hermiticity_defect(a) <= tol::kHermitian * frobenius_norm(a);
}

}  // namespace decohere
