#include "decohere/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "decohere/errors.hpp"

namespace decohere {
namespace {

ComplexMatrix riccati_map(const RiccatiProblem& p, const ComplexMatrix& x) {
  return x * p.b * x + x * p.a - p.c * x - p.b.adjoint();
}

// Step length t in (0, 2] minimizing
//   f(t) = (1-t)^2 ff + 2 (1-t) t^2 fg + t^4 gg,
// the squared residual norm after X <- X + t D.
double line_search_step(double ff, double fg, double gg) {
  const auto f = [&](double t) {
    return (1 - t) * (1 - t) * ff + 2 * (1 - t) * t * t * fg +
           t * t * t * t * gg;
  };
  double best_t = 1.0;
  double best_f = f(1.0);
  if (!(gg > 0.0)) return best_t;

  // f'(t)/(4 gg) is a monic cubic; its real roots are the stationary points.
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = 2.0 * ff / (4.0 * gg);
  companion(1, 2) = -(4.0 * fg + 2.0 * ff) / (4.0 * gg);
  companion(2, 2) = 6.0 * fg / (4.0 * gg);
  const Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const std::complex<double> root = es.eigenvalues()(k);
    if (std::abs(root.imag()) > 1e-10 * (1.0 + std::abs(root.real())))
      continue;
    const double t = root.real();
    if (t <= 0.0 || t > 2.0) continue;
    if (f(t) < best_f) {
      best_f = f(t);
      best_t = t;
    }
  }
  return best_t;
}

double condition_number(const ComplexMatrix& m) {
  const Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

// Inverse square root of a Hermitian positive definite matrix.
ComplexMatrix inv_sqrt_hpd(const ComplexMatrix& g) {
  const HermitianEig eig = hermitian_eig(g);
  const RealVector scale = eig.eigenvalues.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors * scale.cast<Complex>().asDiagonal() *
         eig.eigenvectors.adjoint();
}

}  // namespace

RiccatiProblem RiccatiProblem::from_block(const BlockOp& h,
                                          RiccatiSettings settings) {
  if (!is_hermitian(h))
    throw NotHermitianError("RiccatiProblem: block operator is not Hermitian");
  return RiccatiProblem{h.a11(), h.a12(), h.a22(), std::move(settings)};
}

void RiccatiProblem::validate() const {
  const Eigen::Index n = a.rows();
  const auto square = [n](const ComplexMatrix& m) {
    return m.rows() == n && m.cols() == n;
  };
  if (n < 1 || !square(a) || !square(b) || !square(c))
    throw ShapeError("RiccatiProblem: A, B, C must share one square shape");
  if (settings.initial_guess && !square(*settings.initial_guess))
    throw ShapeError("RiccatiProblem: initial guess has the wrong shape");
  if (settings.max_newton_iters < 0 || !(settings.tol_residual > 0.0))
    throw DomainError("RiccatiProblem: invalid solver settings");
}

BlockOp RiccatiProblem::block() const {
  validate();
  return BlockOp(a, b, b.adjoint(), c);
}

std::string_view to_string(RiccatiMethod m) {
  switch (m) {
    case RiccatiMethod::newton:
      return "newton";
    case RiccatiMethod::invariant_subspace:
      return "invariant_subspace";
    case RiccatiMethod::scalar_quadratic:
      return "scalar_quadratic";
    case RiccatiMethod::closed_form_time_dependent:
      return "closed_form_time_dependent";
  }
  return "unknown";
}

double residual(const RiccatiProblem& p, const ComplexMatrix& x) {
  p.validate();
  if (x.rows() != p.dim() || x.cols() != p.dim())
    throw ShapeError("residual: X has the wrong shape");
  return riccati_map(p, x).norm();
}

RiccatiSolution::RiccatiSolution(const RiccatiProblem& p, ComplexMatrix x,
                                 RiccatiMethod method, int iterations,
                                 std::vector<double> residual_trace)
    : x_(std::move(x)),
      residual_(decohere::residual(p, x_)),
      method_(method),
      iterations_(iterations),
      residual_trace_(std::move(residual_trace)) {}

RiccatiSolution solve_newton(const RiccatiProblem& p) {
  p.validate();
  const Eigen::Index n = p.dim();
  ComplexMatrix x = p.settings.initial_guess.value_or(ComplexMatrix::Zero(n, n));

  ComplexMatrix f = riccati_map(p, x);
  std::vector<double> trace{f.norm()};
  double best = trace.back();

  int iter = 0;
  while (trace.back() > p.settings.tol_residual) {
    if (iter == p.settings.max_newton_iters)
      throw NonConvergenceError(
          "solve_newton: no convergence after " + std::to_string(iter) +
              " iterations, best residual " + std::to_string(best),
          best, trace);
    ++iter;
    const ComplexMatrix delta =
        solve_sylvester(p.a + p.b * x, x * p.b - p.c, -f);
    double t = 1.0;
    if (p.settings.line_search) {
      const ComplexMatrix quad = delta * p.b * delta;
      t = line_search_step(f.squaredNorm(),
                           (f.adjoint() * quad).trace().real(),
                           quad.squaredNorm());
    }
    x += t * delta;
    f = riccati_map(p, x);
    trace.push_back(f.norm());
    if (!std::isfinite(trace.back()))
      throw NonConvergenceError("solve_newton: iterate diverged", best, trace);
    best = std::min(best, trace.back());
  }
  return RiccatiSolution(p, std::move(x), RiccatiMethod::newton, iter,
                         std::move(trace));
}

SpectralSelector SpectralSelector::indices(std::vector<Eigen::Index> idx) {
  SpectralSelector s(Kind::indices);
  std::sort(idx.begin(), idx.end());
  s.indices_ = std::move(idx);
  return s;
}

SpectralSelector SpectralSelector::matching(std::vector<double> targets) {
  SpectralSelector s(Kind::matching);
  std::sort(targets.begin(), targets.end());
  s.targets_ = std::move(targets);
  return s;
}

RiccatiSolution solve_invariant_subspace(const RiccatiProblem& p,
                                         const SpectralSelector& which) {
  const BlockOp r_block = p.block();
  if (!is_hermitian(r_block))
    throw NotHermitianError(
        "solve_invariant_subspace: A and C must be Hermitian");
  const Eigen::Index n = p.dim();
  const HermitianEig eig = hermitian_eig(flatten(r_block));
  const RealVector& lambda = eig.eigenvalues;

  std::vector<Eigen::Index> chosen;
  switch (which.kind()) {
    case SpectralSelector::Kind::lower:
      for (Eigen::Index k = 0; k < n; ++k) chosen.push_back(k);
      break;
    case SpectralSelector::Kind::upper:
      for (Eigen::Index k = n; k < 2 * n; ++k) chosen.push_back(k);
      break;
    case SpectralSelector::Kind::indices:
      chosen = which.index_list();
      break;
    case SpectralSelector::Kind::matching: {
      std::vector<bool> used(static_cast<std::size_t>(2 * n), false);
      for (double target : which.targets()) {
        Eigen::Index best = -1;
        for (Eigen::Index k = 0; k < 2 * n; ++k) {
          if (used[std::size_t(k)]) continue;
          if (best < 0 || std::abs(lambda(k) - target) <
                              std::abs(lambda(best) - target))
            best = k;
        }
        if (best < 0) break;
        used[std::size_t(best)] = true;
        chosen.push_back(best);
      }
      std::sort(chosen.begin(), chosen.end());
      break;
    }
  }
  if (static_cast<Eigen::Index>(chosen.size()) != n ||
      std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end() ||
      chosen.front() < 0 || chosen.back() >= 2 * n)
    throw ShapeError("solve_invariant_subspace: selector must pick " +
                     std::to_string(n) + " distinct eigenvalues");

  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double degenerate = 1e-9 * scale;
  std::vector<bool> in_set(static_cast<std::size_t>(2 * n), false);
  for (auto k : chosen) in_set[std::size_t(k)] = true;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (!in_set[std::size_t(i)]) continue;
    for (Eigen::Index j = 0; j < 2 * n; ++j) {
      if (in_set[std::size_t(j)]) continue;
      if (std::abs(lambda(i) - lambda(j)) <= degenerate)
        throw AmbiguousSubspaceError(
            "solve_invariant_subspace: eigenvalue " +
            std::to_string(lambda(i)) +
            " is degenerate across the spectral cut");
    }
  }

  ComplexMatrix y(2 * n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    y.col(k) = eig.eigenvectors.col(chosen[std::size_t(k)]);
  const ComplexMatrix y1 = y.topRows(n);
  const ComplexMatrix y2 = y.bottomRows(n);
  const double cond = condition_number(y1);
  if (!(cond <= 1e12))
    throw NoGraphRepresentationError(
        "solve_invariant_subspace: selected subspace is not a graph "
        "(cond(Y1) = " +
        std::to_string(cond) + ")");

  // X Y1 = Y2  <=>  Y1^H X^H = Y2^H
  ComplexMatrix x = y1.adjoint().fullPivLu().solve(y2.adjoint()).adjoint();
  return RiccatiSolution(p, std::move(x), RiccatiMethod::invariant_subspace,
                         0);
}

RealVector branch_eigenvalues(const RiccatiProblem& p, const ComplexMatrix& x) {
  const Eigen::Index n = p.dim();
  ComplexMatrix graph(2 * n, n);
  graph.topRows(n) = ComplexMatrix::Identity(n, n);
  graph.bottomRows(n) = x;
  const ComplexMatrix basis =
      graph * inv_sqrt_hpd(ComplexMatrix::Identity(n, n) + x.adjoint() * x);
  const ComplexMatrix compressed =
      basis.adjoint() * flatten(p.block()) * basis;
  return hermitian_eig(0.5 * (compressed + compressed.adjoint())).eigenvalues;
}

BlockOp build_ux(const ComplexMatrix& x) {
  if (x.rows() != x.cols()) throw ShapeError("build_ux: X must be square");
  const ComplexMatrix id = ComplexMatrix::Identity(x.rows(), x.cols());
  return BlockOp(id, -x.adjoint(), x, id);
}

BlockOp inverse_ux(const ComplexMatrix& x) {
  if (x.rows() != x.cols()) throw ShapeError("inverse_ux: X must be square");
  const Eigen::Index n = x.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix g1 = (id + x.adjoint() * x).llt().solve(id);
  const ComplexMatrix g2 = (id + x * x.adjoint()).llt().solve(id);
  return BlockOp(g1, g1 * x.adjoint(), -g2 * x, g2);
}

double condition_ux(const ComplexMatrix& x) {
  const ComplexMatrix gram = x.adjoint() * x;
  const RealVector s2 = hermitian_eig(0.5 * (gram + gram.adjoint())).eigenvalues;
  const double lo = std::max(0.0, s2(0));
  const double hi = std::max(0.0, s2(s2.size() - 1));
  return std::sqrt((1.0 + hi) / (1.0 + lo));
}

Diagonalization diagonalize(const BlockOp& h, const ComplexMatrix& x) {
  if (x.rows() != h.dim() || x.cols() != h.dim())
    throw ShapeError("diagonalize: X does not match the block dimension");
  const BlockOp d = inverse_ux(x) * h * build_ux(x);
  const double off =
      std::sqrt(d.a12().squaredNorm() + d.a21().squaredNorm());
  return {d.a11(), d.a22(), off, condition_ux(x)};
}

Diagonalization diagonalize(const BlockOp& h, const RiccatiSolution& sol) {
  return diagonalize(h, sol.x());
}

DephasingRoots solve_dephasing_quadratic(const DephasingCoupling& m) {
  const Complex m12 = m.m()(0, 1);
  if (std::abs(m12) == 0.0) return {0.0, 0.0};
  const double d = (m.m()(0, 0) - m.m()(1, 1)).real();
  const double r = std::hypot(d, 2.0 * std::abs(m12));
  // Cancellation-free form of the smaller-magnitude root.
  const Complex principal =
      d >= 0.0 ? 2.0 * std::conj(m12) / (r + d) : -2.0 * std::conj(m12) / (r - d);
  return {principal, -1.0 / std::conj(principal)};
}

RiccatiProblem dephasing_problem(const BathSpec& spec,
                                 const DephasingCoupling& m) {
  return RiccatiProblem::from_block(dephasing_hamiltonian(spec, m));
}

Complex z_of_t(double alpha, double t) {
  return std::exp(Complex(0.0, -2.0 * alpha * t));
}

BlockOp periodic_hamiltonian(const BathSpec& spec, double beta, double alpha,
                             double t) {
  const ComplexMatrix h_e = bath_hamiltonian(spec);
  const ComplexMatrix v_beta =
      coupling_operator(spec) +
      beta * ComplexMatrix::Identity(spec.dimension(), spec.dimension());
  const Complex z = z_of_t(alpha, t);
  return BlockOp(h_e, std::conj(z) * v_beta, z * v_beta, h_e);
}

QubitMatrix s_transform(double alpha, double t) {
  const Complex z = z_of_t(alpha, t);
  QubitMatrix s;
  s << 1.0, -std::conj(z), z, 1.0;
  return s / std::sqrt(2.0);
}

double time_dependent_residual(const BathSpec& spec, double beta,
                               double alpha, double t) {
  const BlockOp h = periodic_hamiltonian(spec, beta, alpha, t);
  const RiccatiProblem p{h.a11(), h.a12(), h.a22(), {}};
  const Eigen::Index n = spec.dimension();
  return residual(p, z_of_t(alpha, t) * ComplexMatrix::Identity(n, n));
}

}  // namespace decohere
