// Parallel kernels against their serial references. On a single core the pairs
// should run at about the same speed; the gap shows up with OMP_NUM_THREADS > 1.
#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "dyadlab/continuum.hpp"
#include "dyadlab/open_set.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/schur.hpp"

using namespace dyadlab;

namespace {

GridFunction2D<double> randomGrid(int N) {
  GridFunction2D<double> f(N);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (auto& v : f.values) v = g(rng);
  return f;
}

HaarExpansion<double> randomSymbol(int N) {
  HaarExpansion<double> b(N);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (auto& v : b.coeffs) v = g(rng);
  return b;
}

std::vector<double> randomVector(std::size_t n) {
  std::vector<double> x(n);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (auto& v : x) v = g(rng);
  return x;
}

template <GridFunction2D<double> (*F)(const GridFunction2D<double>&)>
void BM_StrongMaximal(benchmark::State& st) {
  auto f = randomGrid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(F(f));
}

template <Autocorrelation (*F)(const StripIndicator&)>
void BM_Autocorrelate(benchmark::State& st) {
  auto psi = buildStrip(std::ldexp(1.0, -static_cast<int>(st.range(0))), static_cast<int>(st.range(0)) + 4);
  for (auto _ : st) benchmark::DoNotOptimize(F(psi));
}

template <std::vector<double> (*F)(const SparseMatrix<double>&, const std::vector<double>&)>
void BM_BiTreeApply(benchmark::State& st) {
  const int depth = static_cast<int>(st.range(0));
  auto L = treeMatrix(depth, 2.0);
  auto x = randomVector(static_cast<std::size_t>(treeSize(depth)) * treeSize(depth));
  for (auto _ : st) benchmark::DoNotOptimize(F(L, x));
}

template <SparseMatrix<double> (*F)(const SparseMatrix<double>&, const SparseMatrix<double>&)>
void BM_Multiply(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  auto M = multiplication(randomSymbol(N));
  auto T = kron(shiftMatrix1D<double>(Parity::Even, N), SparseMatrix<double>::identity(basisSize(N)));
  for (auto _ : st) benchmark::DoNotOptimize(F(M, T));
}

template <std::vector<double> (*F)(const SparseMatrix<double>&, const std::vector<double>&)>
void BM_Apply(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  auto C = repeatedCommutator(randomSymbol(N));
  auto x = randomVector(static_cast<std::size_t>(C.cols()));
  for (auto _ : st) benchmark::DoNotOptimize(F(C, x));
}

}  // namespace

BENCHMARK(BM_StrongMaximal<strongMaximal>)->Name("strongMaximal/parallel")->Arg(6)->Arg(8);
BENCHMARK(BM_StrongMaximal<strongMaximalSerial>)->Name("strongMaximal/serial")->Arg(6)->Arg(8);
BENCHMARK(BM_Autocorrelate<autocorrelate>)->Name("autocorrelate/parallel")->Arg(5)->Arg(7);
BENCHMARK(BM_Autocorrelate<autocorrelateSerial>)->Name("autocorrelate/serial")->Arg(5)->Arg(7);
BENCHMARK(BM_BiTreeApply<biTreeApply>)->Name("biTreeApply/parallel")->Arg(6)->Arg(8);
BENCHMARK(BM_BiTreeApply<biTreeApplySerial>)->Name("biTreeApply/serial")->Arg(6)->Arg(8);
BENCHMARK(BM_Multiply<multiply<double>>)->Name("sparseMultiply/parallel")->Arg(4)->Arg(5);
BENCHMARK(BM_Multiply<multiplySerial<double>>)->Name("sparseMultiply/serial")->Arg(4)->Arg(5);
BENCHMARK(BM_Apply<apply<double>>)->Name("sparseApply/parallel")->Arg(4)->Arg(5);
BENCHMARK(BM_Apply<applySerial<double>>)->Name("sparseApply/serial")->Arg(4)->Arg(5);

BENCHMARK_MAIN();
