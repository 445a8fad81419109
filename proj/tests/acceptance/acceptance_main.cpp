// Acceptance suite: one PASS/FAIL line per criterion, tolerances and runtime
// budgets pinned below. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decohere/bath.hpp"
#include "decohere/bom.hpp"
#include "decohere/dynamics.hpp"
#include "decohere/numerics.hpp"
#include "decohere/riccati.hpp"
#include "decohere/scenario.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace decohere;
using decohere::testing::Rng;

namespace {

const fs::path kScenarios = DECOHERE_SCENARIO_DIR;
constexpr Complex kI{0.0, 1.0};

struct Outcome {
  bool passed;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> body;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Truncated single-mode ladder operators built from scratch, so the bath
// module is not its own reference.
ComplexMatrix ladder(int levels) {
  ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

ComplexMatrix number_op(int levels) {
  ComplexMatrix h = ComplexMatrix::Zero(levels, levels);
  for (int n = 0; n < levels; ++n) h(n, n) = double(n);
  return h;
}

// Frobenius norm of X B X + X A - C X - B^H, written out directly.
double riccati_residual(const ComplexMatrix& a, const ComplexMatrix& b,
                        const ComplexMatrix& c, const ComplexMatrix& x) {
  return (x * b * x + x * a - c * x - b.adjoint()).norm();
}

// ---------------------------------------------------------------------------

Outcome covariance() {
  constexpr double kTol = 1e-12;
  Rng rng(101);
  double worst = 0.0;
  for (int n : {2, 4, 8}) {
    for (int draw = 0; draw < 100; ++draw) {
      const BathSpec bath({{rng.uniform(0.5, 2.0), rng.cnormal() * 0.3}}, n - 1);
      QubitParams q;
      q.alpha = rng.uniform(-2.0, 2.0);
      q.beta = rng.uniform(-2.0, 2.0);
      q.omega = rng.uniform(-3.0, 3.0);
      const double t = rng.uniform(0.0, 20.0);

      const ComplexMatrix h = flatten(hamiltonian_static(q, bath));
      // e^{iKt} from an eigendecomposition of the dense generator.
      const ComplexMatrix k = flatten(rotation_generator(q.omega, n));
      const ComplexMatrix rot = testing::eig_exp(k, -t);
      const ComplexMatrix expected = rot * h * rot.adjoint();
      const ComplexMatrix got = flatten(hamiltonian_rotating(q, bath, t));
      worst = std::max(worst, (got - expected).norm() / h.norm());
    }
  }
  return {worst <= kTol, "max relative error " + sci(worst) + " over 300 draws, "
                         "tolerance " + sci(kTol)};
}

// Reference residual of the rotating-frame identity. The stepped propagator
// and the shifted static propagator are both formed from dense
// eigendecompositions, independently of the dynamics module's integrators.
double rotating_frame_reference(const Scenario& s, int steps) {
  const Eigen::Index n = s.bath.dimension();
  const ComplexMatrix rho0 = flatten(s.initial_state);
  const double dt = s.time_grid.t_max / double(steps);
  QubitParams shifted = s.qubit;
  shifted.beta = s.qubit.beta - s.qubit.omega / 2.0;
  const ComplexMatrix h_shift = flatten(hamiltonian_static(shifted, s.bath));

  ComplexMatrix u = ComplexMatrix::Identity(2 * n, 2 * n);
  double worst = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double mid = (double(k) - 0.5) * dt;
    u = testing::eig_exp(flatten(hamiltonian_rotating(s.qubit, s.bath, mid)), dt) * u;
    const double t = double(k) * dt;
    const QubitMatrix eta =
        testing::index_sum_partial_trace(u * rho0 * u.adjoint());
    const ComplexMatrix w = testing::eig_exp(h_shift, t);
    const QubitMatrix rho = testing::index_sum_partial_trace(w * rho0 * w.adjoint());
    QubitMatrix v = QubitMatrix::Zero();
    v(0, 0) = std::exp(-kI * s.qubit.omega * t / 2.0);
    v(1, 1) = std::exp(kI * s.qubit.omega * t / 2.0);
    worst = std::max(worst, (eta - v * rho * v.adjoint()).norm());
  }
  return worst;
}

Outcome rotating_frame() {
  constexpr double kTol = 1e-5;
  constexpr double kRatioLo = 3.5, kRatioHi = 4.5;
  const Scenario s = load_scenario(kScenarios / "spin_boson.json").scenario;
  const int steps = s.time_grid.steps;
  if (steps != 2000) return {false, "spin_boson.json must use 2000 steps"};

  const ConvergenceSweep sweep = rotating_frame_convergence(s);
  const double coarse = rotating_frame_reference(s, steps);
  const double fine = rotating_frame_reference(s, 2 * steps);
  const double ratio = coarse / fine;
  // The library's own measurement must agree with the reference route.
  const double route_gap = std::max(std::abs(sweep.coarse_max - coarse) / coarse,
                                    std::abs(sweep.fine_max - fine) / fine);
  const bool ok = coarse <= kTol && ratio >= kRatioLo && ratio <= kRatioHi &&
                  route_gap <= 1e-6;
  return {ok, "max residual " + sci(coarse) + " at 2000 steps (tolerance " +
                  sci(kTol) + "), " + sci(fine) + " at 4000, ratio " +
                  sci(ratio) + " (band [3.5, 4.5]), library vs reference " +
                  sci(route_gap)};
}

Outcome sandwich() {
  constexpr double kTol = 1e-12;
  constexpr Eigen::Index kN = 8;
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const QubitMatrix a1 = rng.qubit();
    const QubitMatrix a2 = rng.qubit();
    const BlockOp b = rng.block(kN);
    const double scale = frobenius_norm(b);
    const ComplexMatrix id = ComplexMatrix::Identity(kN, kN);
    const ComplexMatrix dense = testing::dense_kron(a1, id) * flatten(b) *
                                testing::dense_kron(a2, id);
    const QubitMatrix lhs = testing::index_sum_partial_trace(dense);
    const QubitMatrix rhs =
        a1 * testing::index_sum_partial_trace(flatten(b)) * a2;
    worst = std::max({worst, (lhs - rhs).norm() / scale,
                      sandwich_lemma_check(a1, b, a2) / scale});
  }
  return {worst <= kTol, "max residual / ||B|| " + sci(worst) +
                             " over 1000 triples at N = 8, tolerance " + sci(kTol)};
}

Outcome riccati_cross() {
  constexpr double kAgree = 1e-8, kResidual = 1e-10, kOffdiag = 1e-8;
  const Scenario s = load_scenario(kScenarios / "riccati_n9.json").scenario;
  if (s.bath.dimension() != 9) return {false, "riccati_n9.json must have N = 9"};
  const BlockOp h = hamiltonian_static(s.qubit, s.bath);
  const RiccatiProblem p = RiccatiProblem::from_block(h);

  const RiccatiSolution newton = solve_newton(p);
  // Select the subspace whose eigenvalues match the branch Newton lands on.
  const RealVector lam = branch_eigenvalues(p, newton.x());
  const RiccatiSolution subspace = solve_invariant_subspace(
      p, SpectralSelector::matching(std::vector<double>(lam.begin(), lam.end())));
  const double gap = (newton.x() - subspace.x()).norm();
  const double r_newton = riccati_residual(p.a, p.b, p.c, newton.x());
  const double r_subspace = riccati_residual(p.a, p.b, p.c, subspace.x());

  // Off-diagonal blocks of U_X^{-1} H U_X, with the inverse taken densely.
  const ComplexMatrix ux = flatten(build_ux(newton.x()));
  const ComplexMatrix d = ux.inverse() * flatten(h) * ux;
  const Eigen::Index n = p.dim();
  const double offdiag = std::hypot(d.topRightCorner(n, n).norm(),
                                    d.bottomLeftCorner(n, n).norm());
  const double offdiag_lib = diagonalize(h, newton).offdiag_residual;

  const Scenario z = load_scenario(kScenarios / "alpha_zero.json").scenario;
  const RiccatiSolution zero =
      solve_newton(RiccatiProblem::from_block(hamiltonian_static(z.qubit, z.bath)));
  const bool zero_exact = zero.x().cwiseAbs().maxCoeff() == 0.0;

  const bool ok = gap <= kAgree && r_newton <= kResidual &&
                  r_subspace <= kResidual && offdiag <= kOffdiag &&
                  offdiag_lib <= kOffdiag && zero_exact;
  return {ok, "N = 9: ||X_newton - X_subspace|| " + sci(gap) + " (tolerance " +
                  sci(kAgree) + "), residuals " + sci(r_newton) + ", " +
                  sci(r_subspace) + " (tolerance " + sci(kResidual) +
                  "), off-diagonal " + sci(std::max(offdiag, offdiag_lib)) +
                  " (tolerance " + sci(kOffdiag) + "), newton iterations " +
                  std::to_string(newton.iterations()) + "; alpha = 0: X " +
                  (zero_exact ? "exactly 0" : "nonzero")};
}

Outcome time_dependent() {
  constexpr double kTol = 1e-13;
  const Scenario s = load_scenario(kScenarios / "spin_boson.json").scenario;
  const double alpha = s.qubit.alpha, beta = s.qubit.beta;
  const BathMode mode = s.bath.modes().front();
  const int levels = s.bath.levels();
  const ComplexMatrix a = ladder(levels);
  const ComplexMatrix h_e = mode.omega * number_op(levels);
  const ComplexMatrix v = std::conj(mode.g) * a + mode.g * a.adjoint();
  const ComplexMatrix id = ComplexMatrix::Identity(levels, levels);
  const ComplexMatrix v_beta = v + beta * id;
  const double scale = v_beta.norm();

  Rng rng(505);
  double worst_res = 0.0, worst_blocks = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = k == 0 ? 0.0 : rng.uniform(0.0, 50.0);
    const Complex z = std::exp(-2.0 * kI * alpha * t);
    // H_t = [H_E, conj(z) V_beta; z V_beta, H_E]
    ComplexMatrix h(2 * levels, 2 * levels);
    h << h_e, std::conj(z) * v_beta, z * v_beta, h_e;
    const ComplexMatrix x = z * id;
    worst_res = std::max({worst_res,
                          riccati_residual(h_e, std::conj(z) * v_beta, h_e, x),
                          time_dependent_residual(s.bath, beta, alpha, t)});

    const ComplexMatrix lib_h = flatten(periodic_hamiltonian(s.bath, beta, alpha, t));
    worst_res = std::max(worst_res, (lib_h - h).cwiseAbs().maxCoeff());

    const ComplexMatrix st =
        testing::dense_kron(s_transform(alpha, t), id);
    const ComplexMatrix d = st.adjoint() * h * st;
    const ComplexMatrix plus = h_e + v + beta * id;
    const ComplexMatrix minus = h_e - v - beta * id;
    worst_blocks = std::max(
        {worst_blocks, d.topRightCorner(levels, levels).cwiseAbs().maxCoeff(),
         d.bottomLeftCorner(levels, levels).cwiseAbs().maxCoeff(),
         (d.topLeftCorner(levels, levels) - plus).cwiseAbs().maxCoeff(),
         (d.bottomRightCorner(levels, levels) - minus).cwiseAbs().maxCoeff()});
  }
  const bool ok = worst_res <= kTol * scale && worst_blocks <= kTol;
  return {ok, "max residual " + sci(worst_res) + " over 100 t (tolerance " +
                  sci(kTol * scale) + " = 1e-13 ||V + beta||), S_t blocks " +
                  sci(worst_blocks) + " entrywise (tolerance " + sci(kTol) + ")"};
}

Outcome dephasing() {
  constexpr double kTol = 1e-12;
  const Scenario s = load_scenario(kScenarios / "dephasing.json").scenario;
  const BathMode mode = s.bath.modes().front();
  const int levels = s.bath.levels();
  const ComplexMatrix a = ladder(levels);
  const ComplexMatrix h_e = mode.omega * number_op(levels);
  const ComplexMatrix v = std::conj(mode.g) * a + mode.g * a.adjoint();
  const ComplexMatrix id = ComplexMatrix::Identity(levels, levels);
  const double scale = v.norm();

  Rng rng(606);
  double worst_res = 0.0, worst_pair = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const QubitMatrix m = rng.qubit_hermitian();
    const DephasingRoots roots = solve_dephasing_quadratic(DephasingCoupling(m));
    // Blocks of I (x) H_E + M (x) V.
    const ComplexMatrix A = h_e + m(0, 0) * v;
    const ComplexMatrix B = m(0, 1) * v;
    const ComplexMatrix C = h_e + m(1, 1) * v;
    const RiccatiProblem p = dephasing_problem(s.bath, DephasingCoupling(m));
    for (Complex x : {roots.principal, roots.other}) {
      const double r = riccati_residual(A, B, C, x * id) / std::max(1.0, std::norm(x));
      worst_res = std::max({worst_res, r, residual(p, x * id) / std::max(1.0, std::norm(x))});
    }
    const Complex partner = -1.0 / std::conj(roots.principal);
    worst_pair = std::max(worst_pair, std::abs(roots.other - partner) /
                                          std::max(1.0, std::abs(partner)));
  }
  const bool ok = worst_res <= kTol * scale && worst_pair <= kTol;
  return {ok, "max operator residual " + sci(worst_res) + " over 50 M (tolerance " +
                  sci(kTol * scale) + " = 1e-12 ||V||), root pair relation " +
                  sci(worst_pair) + " (tolerance " + sci(kTol) + ")"};
}

// Ground energy of omega a^H a + conj(g) a + g a^H at a large cutoff.
double ground_energy_oracle(double omega, Complex g, int cutoff) {
  const ComplexMatrix a = ladder(cutoff + 1);
  const ComplexMatrix h =
      omega * number_op(cutoff + 1) + std::conj(g) * a + g * a.adjoint();
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues()(0);
}

Outcome weyl() {
  constexpr double kTol = 1e-6;
  constexpr double kOmega = 1.0;
  constexpr Complex kG{0.2, 0.0};
  const double oracle = ground_energy_oracle(kOmega, kG, 60);
  const double analytic = -std::norm(kG) / kOmega;
  const double oracle_gap = std::abs(oracle - analytic);

  const DisplacedCheck top = displaced_check(BathSpec({{kOmega, kG}}, 12), 6);
  const double residual = std::max(top.residual_plus, top.residual_minus);
  const double c_error = std::abs(top.c_of_g - analytic);

  // Monotone in the cutoff on a fixed three-level window.
  std::vector<double> sweep;
  for (int cutoff : {4, 6, 8, 10, 12})
    sweep.push_back(displaced_check(BathSpec({{kOmega, kG}}, cutoff), 3).residual_plus);
  bool monotone = true;
  for (std::size_t k = 1; k < sweep.size(); ++k) monotone &= sweep[k] < sweep[k - 1];

  std::string trail;
  for (double r : sweep) trail += (trail.empty() ? "" : ", ") + sci(r);
  const bool ok = residual <= kTol && c_error <= kTol && oracle_gap <= kTol && monotone;
  return {ok, "n_max = 12: residual " + sci(residual) + " on 6 levels, C " +
                  sci(top.c_of_g) + " vs -|g|^2/omega (error " + sci(c_error) +
                  ", ground-energy oracle agrees to " + sci(oracle_gap) +
                  "), tolerance " + sci(kTol) + "; n_max 4..12: " + trail +
                  (monotone ? " (decreasing)" : " (NOT decreasing)")};
}

Outcome state_sanity() {
  constexpr double kTrace = 1e-10, kHerm = 1e-11, kFloor = -1e-9, kPurity = 1e-9;
  double trace = 0.0, herm = 0.0, floor = 1.0, purity = 0.0;
  int trajectories = 0;
  std::size_t points = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(kScenarios))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    const Scenario s = load_scenario(file).scenario;
    for (PropagationMode mode : {PropagationMode::rotating_stepped,
                                 PropagationMode::static_exact,
                                 PropagationMode::factored}) {
      const Trajectory tr = reduced_dynamics(s, mode);
      ++trajectories;
      points += tr.reduced_states.size();
      for (const QubitMatrix& rho : tr.reduced_states) {
        // Recomputed here rather than read from the trajectory diagnostics.
        trace = std::max(trace, std::abs(rho.trace() - 1.0));
        herm = std::max(herm, (rho - rho.adjoint()).norm());
        const QubitMatrix hp = 0.5 * (rho + rho.adjoint());
        floor = std::min(floor, Eigen::SelfAdjointEigenSolver<QubitMatrix>(hp)
                                    .eigenvalues()(0));
        purity = std::max(purity, (rho * rho).trace().real());
      }
    }
  }
  const bool ok = trace <= kTrace && herm <= kHerm && floor >= kFloor &&
                  purity <= 1.0 + kPurity;
  return {ok, std::to_string(trajectories) + " trajectories from " +
                  std::to_string(files.size()) + " scenarios, " +
                  std::to_string(points) + " points: trace dev " + sci(trace) +
                  ", hermiticity dev " + sci(herm) + ", positivity floor " +
                  sci(floor) + ", max purity - 1 " + sci(purity - 1.0)};
}

Outcome kernels() {
  constexpr double kExpm = 1e-11, kSylvester = 1e-10, kTrace = 1e-14;
  Rng rng(909);
  double expm_err = 0.0, syl_err = 0.0, trace_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix h = rng.hermitian(8);
    const double t = rng.uniform(0.0, 3.0);
    expm_err = std::max(
        expm_err, (expm(h, Complex(0.0, -t)) - testing::eig_exp(h, t)).norm());
  }
  for (int n = 1; n <= 8; ++n) {
    for (int m = 1; m <= 8; ++m) {
      const ComplexMatrix p = rng.matrix(n, n) + 4.0 * ComplexMatrix::Identity(n, n);
      const ComplexMatrix q = rng.matrix(m, m) + 4.0 * ComplexMatrix::Identity(m, m);
      const ComplexMatrix r = rng.matrix(m, n);
      const ComplexMatrix ref = testing::kron_sylvester(p, q, r);
      syl_err = std::max(syl_err, (solve_sylvester(p, q, r) - ref).norm() / ref.norm());
    }
  }
  for (int n : {1, 2, 3, 5, 8}) {
    for (int trial = 0; trial < 20; ++trial) {
      const BlockOp b = rng.block(n);
      const QubitMatrix ref = testing::index_sum_partial_trace(flatten(b));
      trace_err = std::max(trace_err, (partial_trace_env(b) - ref).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = expm_err <= kExpm && syl_err <= kSylvester && trace_err <= kTrace;
  return {ok, "expm vs eig " + sci(expm_err) + " (tolerance " + sci(kExpm) +
                  "), sylvester vs kronecker " + sci(syl_err) + " (tolerance " +
                  sci(kSylvester) + "), partial trace vs index sum " +
                  sci(trace_err) + " (tolerance " + sci(kTrace) + ")"};
}

}  // namespace

int main() {
  // Criterion 8 shares its budget with criterion 2.
  const std::vector<Criterion> criteria = {
      {1, "covariance", 5.0, covariance},
      {2, "rotating_frame", 60.0, rotating_frame},
      {3, "sandwich", 10.0, sandwich},
      {4, "riccati_cross", 30.0, riccati_cross},
      {5, "time_dependent_riccati", 5.0, time_dependent},
      {6, "dephasing_quadratic", 5.0, dephasing},
      {7, "weyl_displacement", 10.0, weyl},
      {8, "state_sanity", 60.0, state_sanity},
      {9, "kernel_oracles", 10.0, kernels},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool passed = o.passed && in_budget;
    if (!passed) ++failures;
    std::printf("%s [%d] %s: %s; %.2f s (budget %.0f s%s)\n",
                passed ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                secs, c.budget_s, in_budget ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
