#include "decohere/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "decohere/errors.hpp"

namespace decohere {
namespace {

QubitMatrix hadamard() {
  QubitMatrix u;
  u << 1.0, 1.0, 1.0, -1.0;
  return u / std::sqrt(2.0);
}

// Advances a flattened propagator across grid intervals with midpoint steps.
class MidpointStepper {
 public:
  MidpointStepper(HamiltonianSource h, Eigen::Index flat_dim, int substeps)
      : h_(std::move(h)),
        u_(ComplexMatrix::Identity(flat_dim, flat_dim)),
        substeps_(substeps) {}

  void advance(double t_begin, double duration) {
    const double dt = duration / double(substeps_);
    for (int k = 0; k < substeps_; ++k) {
      const double mid = t_begin + (double(k) + 0.5) * dt;
      u_ = expm(flatten(h_(mid)), Complex(0.0, -dt)) * u_;
    }
  }

  const ComplexMatrix& propagator() const noexcept { return u_; }

 private:
  HamiltonianSource h_;
  ComplexMatrix u_;
  int substeps_;
};

QubitMatrix evolve_and_trace(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return partial_trace_env(unflatten(u * rho * u.adjoint()));
}

}  // namespace

void Scenario::validate() const {
  if (!std::isfinite(qubit.alpha) || !std::isfinite(qubit.beta) ||
      !std::isfinite(qubit.omega) || !std::isfinite(qubit.coupling.at_plus) ||
      !std::isfinite(qubit.coupling.at_minus))
    throw DomainError("Scenario: qubit parameters must be finite");
  if (!(time_grid.t_max >= 0.0) || !std::isfinite(time_grid.t_max))
    throw DomainError("Scenario: t_max must be finite and >= 0");
  if (time_grid.steps < 1) throw DomainError("Scenario: steps must be >= 1");
  if (integrator.substeps_per_step < 1)
    throw DomainError("Scenario: substeps_per_step must be >= 1");
  if (initial_state.dim() != bath.dimension())
    throw ShapeError("Scenario: initial state dimension does not match bath");
  validate_density(initial_state);
}

BlockOp hamiltonian_static(const QubitParams& q, const BathSpec& bath,
                           std::optional<double> beta_override) {
  const double beta = beta_override.value_or(q.beta);
  const ComplexMatrix h_e = bath_hamiltonian(bath);
  const ComplexMatrix v = coupling_operator(bath);
  const ComplexMatrix id = identity(bath.dimension());
  return BlockOp(h_e + q.coupling.at_plus * v + beta * id, q.alpha * id,
                 q.alpha * id, h_e + q.coupling.at_minus * v - beta * id);
}

BlockOp hamiltonian_rotating(const QubitParams& q, const BathSpec& bath,
                             double t) {
  const Eigen::Index n = bath.dimension();
  const QubitMatrix h_q =
      q.beta * pauli::z() + q.alpha * (std::cos(q.omega * t) * pauli::x() +
                                       std::sin(q.omega * t) * pauli::y());
  return embed_qubit(h_q, n) +
         kron_qubit_env(pauli::identity(), bath_hamiltonian(bath)) +
         interaction_hamiltonian(bath, q.coupling);
}

BlockOp rotation_generator(double omega, Eigen::Index n) {
  return embed_qubit(-0.5 * omega * pauli::z(), n);
}

QubitMatrix frame_rotation(double omega, double t) {
  QubitMatrix v = QubitMatrix::Zero();
  v(0, 0) = std::exp(Complex(0.0, -0.5 * omega * t));
  v(1, 1) = std::exp(Complex(0.0, 0.5 * omega * t));
  return v;
}

BlockOp propagator_static(const BlockOp& h, double t) {
  if (!is_hermitian(h))
    throw NotHermitianError("propagator_static: Hamiltonian is not Hermitian");
  return unflatten(expm(flatten(h), Complex(0.0, -t)));
}

BlockOp propagator_factored(const QubitParams& q, const BathSpec& bath,
                            double t) {
  const BlockOp h_eff = hamiltonian_static(q, bath, q.beta - 0.5 * q.omega);
  return embed_qubit(frame_rotation(q.omega, t), bath.dimension()) *
         propagator_static(h_eff, t);
}

BlockOp step_evolve(const HamiltonianSource& h, double t_begin,
                    double duration, int steps) {
  if (steps < 1) throw DomainError("step_evolve: steps must be >= 1");
  const Eigen::Index flat = 2 * h(t_begin).dim();
  MidpointStepper stepper(h, flat, steps);
  stepper.advance(t_begin, duration);
  return unflatten(stepper.propagator());
}

QubitMatrix periodic_frame(double alpha, double t) {
  QubitMatrix j = QubitMatrix::Zero();
  j(0, 0) = std::exp(Complex(0.0, alpha * t));
  j(1, 1) = std::exp(Complex(0.0, -alpha * t));
  return j * hadamard();
}

Trajectory reduced_dynamics(const Scenario& s, PropagationMode mode) {
  s.validate();
  const ComplexMatrix rho0 = flatten(s.initial_state);
  const int steps = s.time_grid.steps;

  Trajectory out;
  out.times.reserve(std::size_t(steps) + 1);
  out.reduced_states.reserve(std::size_t(steps) + 1);

  const auto record = [&](double t, const ComplexMatrix& u) {
    const QubitMatrix rho = evolve_and_trace(u, rho0);
    out.times.push_back(t);
    out.reduced_states.push_back(rho);
    out.diagnostics.push_back(state_diagnostics(rho));
  };

  switch (mode) {
    case PropagationMode::rotating_stepped: {
      const QubitParams q = s.qubit;
      const BathSpec bath = s.bath;
      MidpointStepper stepper(
          [q, bath](double t) { return hamiltonian_rotating(q, bath, t); },
          rho0.rows(), s.integrator.substeps_per_step);
      record(0.0, stepper.propagator());
      for (int k = 0; k < steps; ++k) {
        const double t0 = s.time_grid.time(k);
        stepper.advance(t0, s.time_grid.time(k + 1) - t0);
        record(s.time_grid.time(k + 1), stepper.propagator());
      }
      break;
    }
    case PropagationMode::static_exact: {
      const ComplexMatrix h = flatten(hamiltonian_static(s.qubit, s.bath));
      for (int k = 0; k <= steps; ++k) {
        const double t = s.time_grid.time(k);
        record(t, expm(h, Complex(0.0, -t)));
      }
      break;
    }
    case PropagationMode::factored: {
      for (int k = 0; k <= steps; ++k) {
        const double t = s.time_grid.time(k);
        record(t, flatten(propagator_factored(s.qubit, s.bath, t)));
      }
      break;
    }
  }
  return out;
}

std::vector<double> rotating_frame_check(const Scenario& s) {
  const Trajectory eta = reduced_dynamics(s, PropagationMode::rotating_stepped);

  Scenario shifted = s;
  shifted.qubit.beta = s.qubit.beta - 0.5 * s.qubit.omega;
  shifted.qubit.omega = 0.0;
  const Trajectory rho = reduced_dynamics(shifted, PropagationMode::static_exact);

  std::vector<double> residuals;
  residuals.reserve(eta.times.size());
  for (std::size_t k = 0; k < eta.times.size(); ++k) {
    const QubitMatrix v = frame_rotation(s.qubit.omega, eta.times[k]);
    residuals.push_back(
        (eta.reduced_states[k] - v * rho.reduced_states[k] * v.adjoint())
            .norm());
  }
  return residuals;
}

ConvergenceSweep rotating_frame_convergence(const Scenario& s) {
  const auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  Scenario fine = s;
  fine.integrator.substeps_per_step = 2 * s.integrator.substeps_per_step;
  const double coarse = max_of(rotating_frame_check(s));
  const double refined = max_of(rotating_frame_check(fine));
  return {coarse, refined, refined > 0.0 ? coarse / refined : 0.0};
}

StateDiagnostics state_diagnostics(const QubitMatrix& rho) {
  const QubitMatrix herm = 0.5 * (rho + rho.adjoint());
  const double a = herm(0, 0).real();
  const double d = herm(1, 1).real();
  const double floor =
      0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(herm(0, 1)));
  return {std::abs(rho.trace() - 1.0), floor, (rho - rho.adjoint()).norm(),
          (rho * rho).trace().real()};
}

BlochVector bloch_vector(const QubitMatrix& rho) {
  if (!rho.allFinite() || (rho - rho.adjoint()).norm() > 1e-9 ||
      std::abs(rho.trace() - 1.0) > 1e-9)
    throw InvalidStateError("bloch_vector: not a unit-trace Hermitian matrix");
  const BlochVector b{(rho * pauli::x()).trace().real(),
                      (rho * pauli::y()).trace().real(),
                      (rho * pauli::z()).trace().real()};
  if (std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z) > 1.0 + 1e-9)
    throw InvalidStateError("bloch_vector: Bloch vector longer than 1");
  return b;
}

BlockOp product_state(const QubitMatrix& rho_q, const ComplexMatrix& rho_e) {
  return kron_qubit_env(rho_q, rho_e);
}

ComplexMatrix vacuum_state(const BathSpec& bath) {
  ComplexMatrix rho = ComplexMatrix::Zero(bath.dimension(), bath.dimension());
  rho(0, 0) = 1.0;
  return rho;
}

void validate_density(const BlockOp& rho) {
  const ComplexMatrix flat = flatten(rho);
  if (!flat.allFinite())
    throw InvalidStateError("density operator has non-finite entries");
  if (hermiticity_defect(flat) > 1e-10 * std::max(1.0, flat.norm()))
    throw InvalidStateError("density operator is not Hermitian");
  if (std::abs(flat.trace() - 1.0) > 1e-10)
    throw InvalidStateError("density operator does not have unit trace");
  const HermitianEig eig = hermitian_eig(0.5 * (flat + flat.adjoint()));
  if (eig.eigenvalues(0) < -1e-10)
    throw InvalidStateError("density operator is not positive semidefinite");
}

}  // namespace decohere
