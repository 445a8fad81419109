#include <benchmark/benchmark.h>

#include <random>

#include "decohere/bath.hpp"
#include "decohere/dynamics.hpp"
#include "decohere/numerics.hpp"
#include "decohere/riccati.hpp"

namespace {

using namespace decohere;

ComplexMatrix random_hermitian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  ComplexMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(d(gen), d(gen));
  return 0.5 * (m + m.adjoint());
}

QubitParams spin_boson_qubit() {
  QubitParams q;
  q.alpha = 0.3;
  q.beta = 0.5;
  q.omega = 1.0;
  return q;
}

void BM_Expm(benchmark::State& state) {
  const ComplexMatrix h = random_hermitian(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(expm(h, Complex(0.0, -0.7)));
}
BENCHMARK(BM_Expm)->RangeMultiplier(2)->Range(2, 128);

void BM_HermitianEig(benchmark::State& state) {
  const ComplexMatrix h = random_hermitian(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->RangeMultiplier(2)->Range(2, 128);

void BM_Sylvester(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const ComplexMatrix shift = 4.0 * ComplexMatrix::Identity(n, n);
  const ComplexMatrix p = random_hermitian(n, 3) + shift;
  const ComplexMatrix q = random_hermitian(n, 4) + shift;
  const ComplexMatrix r = random_hermitian(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sylvester(p, q, r));
}
BENCHMARK(BM_Sylvester)->DenseRange(2, 16, 2);

void BM_RiccatiNewton(benchmark::State& state) {
  const BathSpec bath({{1.3, 0.2}}, int(state.range(0)));
  const RiccatiProblem p =
      RiccatiProblem::from_block(hamiltonian_static(spin_boson_qubit(), bath));
  for (auto _ : state) benchmark::DoNotOptimize(solve_newton(p));
}
BENCHMARK(BM_RiccatiNewton)->DenseRange(2, 12, 2);

void BM_StepEvolve(benchmark::State& state) {
  const BathSpec bath({{1.0, 0.2}}, 4);
  const QubitParams q = spin_boson_qubit();
  const int steps = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(step_evolve(
        [&](double t) { return hamiltonian_rotating(q, bath, t); }, 10.0, steps));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_StepEvolve)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
