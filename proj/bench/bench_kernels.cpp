// OpenMP kernels against their serial references. Sizes straddle the
// parallel thresholds in linop.cpp.

#include <benchmark/benchmark.h>

#include <vector>

#include "qmtherm/linop.hpp"
#include "qmtherm/linop_serial.hpp"
#include "qmtherm/random.hpp"

namespace {

using qmtherm::ComplexMatrix;

ComplexMatrix gaussian(std::size_t n, std::uint64_t seed) {
  qmtherm::Rng rng(seed);
  return qmtherm::random_gaussian_matrix(n, n, rng);
}

std::vector<ComplexMatrix> kraus_family(std::size_t n, std::size_t count) {
  std::vector<ComplexMatrix> ks;
  for (std::size_t k = 0; k < count; ++k) ks.push_back(gaussian(n, 10 + k));
  return ks;
}

template <bool Parallel>
void BM_Kron(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix a = gaussian(n, 1);
  const ComplexMatrix b = gaussian(n, 2);
  for (auto _ : state) {
    ComplexMatrix out = Parallel ? qmtherm::kron(a, b) : qmtherm::serial::kron(a, b);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_PartialTrace(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix m = gaussian(n * n, 3);
  for (auto _ : state) {
    ComplexMatrix out = Parallel ? qmtherm::partial_trace(m, {n, n}, qmtherm::Subsystem::First)
                                 : qmtherm::serial::partial_trace(m, {n, n}, qmtherm::Subsystem::First);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_KrausSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ks = kraus_family(n, 8);
  const ComplexMatrix m = gaussian(n, 4);
  for (auto _ : state) {
    ComplexMatrix out = Parallel ? qmtherm::kraus_sum(ks, m) : qmtherm::serial::kraus_sum(ks, m);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Kron, false)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK_TEMPLATE(BM_Kron, true)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK_TEMPLATE(BM_PartialTrace, false)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK_TEMPLATE(BM_PartialTrace, true)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK_TEMPLATE(BM_KrausSum, false)->Arg(8)->Arg(32)->Arg(64);
BENCHMARK_TEMPLATE(BM_KrausSum, true)->Arg(8)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
