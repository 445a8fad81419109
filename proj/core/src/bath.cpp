#include "decohere/bath.hpp"

#include <cmath>
#include <string>

#include "decohere/errors.hpp"

namespace decohere {
namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix single_mode_annihilation(int levels) {
  ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::Index ipow(Eigen::Index base, std::size_t exp) {
  Eigen::Index r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

BathSpec::BathSpec(std::vector<BathMode> modes, int fock_cutoff)
    : modes_(std::move(modes)), fock_cutoff_(fock_cutoff), dimension_(1) {
  if (modes_.empty()) throw DomainError("BathSpec: at least one mode required");
  if (fock_cutoff_ < 1) throw DomainError("BathSpec: fock_cutoff must be >= 1");
  for (const auto& m : modes_) {
    if (!std::isfinite(m.omega) || m.omega <= 0.0)
      throw DomainError("BathSpec: mode frequencies must be finite and > 0");
    if (!std::isfinite(m.g.real()) || !std::isfinite(m.g.imag()))
      throw DomainError("BathSpec: couplings must be finite");
  }
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    dimension_ *= levels();
    if (dimension_ > kMaxDimension)
      throw DimensionCapError(
          "BathSpec: environment dimension (" + std::to_string(levels()) +
          ")^" + std::to_string(modes_.size()) + " exceeds cap " +
          std::to_string(kMaxDimension));
  }
}

QubitMatrix SigmaZCoupling::matrix() const {
  QubitMatrix m = QubitMatrix::Zero();
  m(0, 0) = at_plus;
  m(1, 1) = at_minus;
  return m;
}

DephasingCoupling::DephasingCoupling(const QubitMatrix& m) : m_(m) {
  if (!m.allFinite() || (m - m.adjoint()).norm() > tol::kHermitian * m.norm())
    throw NotHermitianError("DephasingCoupling: M must be Hermitian");
}

ComplexMatrix annihilation(const BathSpec& spec, std::size_t mode) {
  const std::size_t count = spec.modes().size();
  if (mode >= count)
    throw ShapeError("annihilation: mode index " + std::to_string(mode) +
                     " out of range");
  const Eigen::Index levels = spec.levels();
  const ComplexMatrix before = identity(ipow(levels, mode));
  const ComplexMatrix after = identity(ipow(levels, count - mode - 1));
  return kron(kron(before, single_mode_annihilation(spec.levels())), after);
}

ComplexMatrix bath_hamiltonian(const BathSpec& spec) {
  const Eigen::Index n = spec.dimension();
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < spec.modes().size(); ++k) {
    const ComplexMatrix a = annihilation(spec, k);
    h += spec.modes()[k].omega * (a.adjoint() * a);
  }
  return h;
}

ComplexMatrix coupling_operator(const BathSpec& spec) {
  const Eigen::Index n = spec.dimension();
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < spec.modes().size(); ++k) {
    const ComplexMatrix a = annihilation(spec, k);
    const Complex g = spec.modes()[k].g;
    v += std::conj(g) * a + g * a.adjoint();
  }
  return v;
}

ComplexMatrix weyl_generator(const BathSpec& spec) {
  const Eigen::Index n = spec.dimension();
  ComplexMatrix gen = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < spec.modes().size(); ++k) {
    const ComplexMatrix a = annihilation(spec, k);
    const Complex shift = spec.modes()[k].g / spec.modes()[k].omega;
    gen += std::conj(shift) * a - shift * a.adjoint();
  }
  return gen;
}

ComplexMatrix weyl_operator(const BathSpec& spec) {
  return expm(weyl_generator(spec));
}

std::vector<Eigen::Index> low_fock_indices(const BathSpec& spec, int levels) {
  std::vector<Eigen::Index> out;
  const Eigen::Index base = spec.levels();
  for (Eigen::Index idx = 0; idx < spec.dimension(); ++idx) {
    bool keep = true;
    Eigen::Index rest = idx;
    for (std::size_t k = 0; k < spec.modes().size(); ++k, rest /= base)
      keep = keep && (rest % base < levels);
    if (keep) out.push_back(idx);
  }
  return out;
}

ComplexMatrix restrict_to(const ComplexMatrix& m,
                          const std::vector<Eigen::Index>& indices) {
  const auto k = static_cast<Eigen::Index>(indices.size());
  ComplexMatrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      out(i, j) = m(indices[std::size_t(i)], indices[std::size_t(j)]);
  return out;
}

DisplacedCheck displaced_check(const BathSpec& spec,
                               std::optional<int> subspace_levels) {
  if (spec.modes().size() > 9)
    throw DomainError("displaced_check: at most 9 modes supported");
  const int levels =
      subspace_levels.value_or((spec.fock_cutoff() + 1) / 2);
  if (levels < 1 || levels > spec.levels())
    throw DomainError("displaced_check: subspace levels out of range");

  const ComplexMatrix h_e = bath_hamiltonian(spec);
  const ComplexMatrix v = coupling_operator(spec);
  const ComplexMatrix w = weyl_operator(spec);
  const auto idx = low_fock_indices(spec, levels);

  const ComplexMatrix plus_gap =
      restrict_to(h_e + v - w * h_e * w.adjoint(), idx);
  const ComplexMatrix minus_gap =
      restrict_to(h_e - v - w.adjoint() * h_e * w, idx);
  const double c = plus_gap.trace().real() / double(idx.size());
  const ComplexMatrix shift =
      c * ComplexMatrix::Identity(plus_gap.rows(), plus_gap.cols());

  return {(plus_gap - shift).norm(), (minus_gap - shift).norm(), c, levels};
}

BlockOp dephasing_hamiltonian(const BathSpec& spec,
                              const DephasingCoupling& m) {
  const ComplexMatrix h_e = bath_hamiltonian(spec);
  return kron_qubit_env(pauli::identity(), h_e) +
         kron_qubit_env(m.m(), coupling_operator(spec));
}

BlockOp interaction_hamiltonian(const BathSpec& spec, const SigmaZCoupling& f) {
  return kron_qubit_env(f.matrix(), coupling_operator(spec));
}

}  // namespace decohere
