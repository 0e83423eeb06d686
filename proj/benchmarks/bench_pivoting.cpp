#include <benchmark/benchmark.h>

#include <random>

#include <sensorsel/pivoting.hpp>

using namespace sensorsel;

namespace {

Eigen::MatrixXd gaussian(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

// Candidate count n with r = p = 30, the size of a typical grid problem.
void BM_PivotSelect(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXd v = gaussian(30, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qr_pivot_select(RealCandidates(v), 30));
  state.SetComplexityN(n);
}
BENCHMARK(BM_PivotSelect)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_PivotSelectCost(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXd v = gaussian(30, n, 2);
  const Eigen::VectorXd eta = gaussian(n, 1, 3).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(qr_pivot_select_cost(RealCandidates(v), CostField(eta, 1.0), 30));
  state.SetComplexityN(n);
}
BENCHMARK(BM_PivotSelectCost)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_PivotSelectComplex(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXcd v = gaussian(30, n, 4).cast<Complex>() + Complex(0, 1) * gaussian(30, n, 5).cast<Complex>();
  for (auto _ : state) benchmark::DoNotOptimize(qr_pivot_select(ComplexCandidates(v), 30));
}
BENCHMARK(BM_PivotSelectComplex)->Arg(4096);

}  // namespace
