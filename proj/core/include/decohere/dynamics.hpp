#pragma once

// Qubit-environment propagation and reduced dynamics (hbar = 1).
//
// The driven model is
//   H(t, beta) = H_Q(t, beta) (x) 1 + 1 (x) H_E + f(sigma_z) (x) V,
//   H_Q(t, beta) = beta sigma_z + alpha (sigma_x cos wt + sigma_y sin wt),
// and H(beta) = H(0, beta). With K = -(w/2) sigma_z (x) 1 it satisfies
//   H(t, beta) = e^{iKt} H(beta) e^{-iKt},   H(beta) + K = H(beta - w/2),
// so its propagator factors as e^{iKt} exp(-i H(beta - w/2) t) and the
// reduced state obeys eta_t = V_t rho_t(beta - w/2) V_t^H.

#include <functional>
#include <optional>
#include <vector>

#include "decohere/bath.hpp"
#include "decohere/bom.hpp"

namespace decohere {

struct QubitParams {
  double alpha = 0.0;  // transverse amplitude, omega_1 / 2
  double beta = 0.0;   // longitudinal amplitude, omega_0 / 2
  double omega = 0.0;  // rotation angular frequency
  SigmaZCoupling coupling;
};

struct TimeGrid {
  double t_max = 1.0;
  int steps = 1;

  double time(int k) const { return t_max * double(k) / double(steps); }
};

struct IntegratorSettings {
  int substeps_per_step = 1;
};

struct Scenario {
  QubitParams qubit;
  BathSpec bath;
  BlockOp initial_state;  // density operator on C^2 (x) H_N, may be correlated
  TimeGrid time_grid;
  IntegratorSettings integrator;

  /// Throws InvalidStateError if the initial state is not a density operator
  /// and DomainError for an invalid grid or non-finite parameters.
  void validate() const;
};

enum class PropagationMode { rotating_stepped, static_exact, factored };

struct StateDiagnostics {
  double trace_dev;         // |Tr rho - 1|
  double positivity_floor;  // smallest eigenvalue of the Hermitian part
  double herm_dev;          // ||rho - rho^H||_F
  double purity;            // Re Tr rho^2
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QubitMatrix> reduced_states;
  std::vector<StateDiagnostics> diagnostics;
};

struct BlochVector {
  double x, y, z;
};

/// [H_E + f(+1) V + beta, alpha; alpha, H_E + f(-1) V - beta]
BlockOp hamiltonian_static(const QubitParams& q, const BathSpec& bath,
                           std::optional<double> beta_override = {});

BlockOp hamiltonian_rotating(const QubitParams& q, const BathSpec& bath,
                             double t);

/// K = -(omega / 2) sigma_z (x) 1
BlockOp rotation_generator(double omega, Eigen::Index n);

/// V_t = diag(e^{-i omega t / 2}, e^{i omega t / 2}), so e^{iKt} = V_t (x) 1.
QubitMatrix frame_rotation(double omega, double t);

/// exp(-i h t). h must be Hermitian.
BlockOp propagator_static(const BlockOp& h, double t);

/// e^{iKt} exp(-i H(beta - omega/2) t), the exact propagator of H(t, beta).
BlockOp propagator_factored(const QubitParams& q, const BathSpec& bath,
                            double t);

using HamiltonianSource = std::function<BlockOp(double)>;

/// Time-ordered exponential of -i h(t) over [t_begin, t_begin + duration]
/// by exponential midpoint steps: prod_k exp(-i h(t_k + dt/2) dt).
BlockOp step_evolve(const HamiltonianSource& h, double t_begin,
                    double duration, int steps);

inline BlockOp step_evolve(const HamiltonianSource& h, double t_max,
                           int steps) {
  return step_evolve(h, 0.0, t_max, steps);
}

/// J_t U, the qubit factor mapping H(beta)-states to the frame in which the
/// Hamiltonian is the periodic H_t; U is the Hadamard matrix and
/// J_t = exp(i alpha sigma_z t).
QubitMatrix periodic_frame(double alpha, double t);

/// rho_Q(t) = Tr_E(U_t rho U_t^H) on every grid point.
Trajectory reduced_dynamics(const Scenario& s, PropagationMode mode);

/// ||eta_t - V_t rho_t(beta - omega/2) V_t^H||_F per grid point, where eta_t
/// uses the stepped propagator of H(t, beta) and rho_t the exact propagator
/// of the time-independent model at the shifted beta. The values carry the
/// integrator's second-order error.
std::vector<double> rotating_frame_check(const Scenario& s);

struct ConvergenceSweep {
  double coarse_max;  // max residual at the scenario's resolution
  double fine_max;    // max residual at twice the substeps
  double ratio;       // coarse_max / fine_max
};

ConvergenceSweep rotating_frame_convergence(const Scenario& s);

StateDiagnostics state_diagnostics(const QubitMatrix& rho);

/// Components Tr(rho sigma_i). Throws InvalidStateError unless rho is
/// Hermitian with unit trace (1e-9) and Bloch norm <= 1 + 1e-9.
BlochVector bloch_vector(const QubitMatrix& rho);

/// rho_q (x) rho_e
BlockOp product_state(const QubitMatrix& rho_q, const ComplexMatrix& rho_e);

/// |0><0| on the environment (all modes in vacuum).
ComplexMatrix vacuum_state(const BathSpec& bath);

/// Throws InvalidStateError unless rho is Hermitian, unit trace and
/// positive semidefinite, each within 1e-10.
void validate_density(const BlockOp& rho);

}  // namespace decohere
