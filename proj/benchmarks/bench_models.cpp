#include <benchmark/benchmark.h>

#include <numeric>

#include <sensorsel/balanced.hpp>
#include <sensorsel/membrane.hpp>
#include <sensorsel/reconstruction.hpp>

using namespace sensorsel;

namespace {

void BM_Gramians(benchmark::State& state) {
  const auto sys = build_spring_mass(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gramians(sys));
}
BENCHMARK(BM_Gramians)->Arg(16)->Arg(64);

// All 906192 six-sensor subsets of the 16-mass system.
void BM_SubsetEnumeration(benchmark::State& state) {
  const Gramians g = gramians(build_spring_mass(16));
  std::vector<Index> all(32);
  std::iota(all.begin(), all.end(), Index{0});
  for (auto _ : state) benchmark::DoNotOptimize(SubsetEnumeration(g.controllability, all, 6));
}
BENCHMARK(BM_SubsetEnumeration)->Unit(benchmark::kMillisecond);

void BM_MembraneBasis(benchmark::State& state) {
  const MembraneModel model;
  for (auto _ : state) benchmark::DoNotOptimize(membrane_basis(model));
}
BENCHMARK(BM_MembraneBasis)->Unit(benchmark::kMillisecond);

void BM_MembraneError(benchmark::State& state) {
  const MembraneModel model;
  const Basis basis = membrane_basis(model);
  std::vector<Eigen::VectorXd> ics;
  for (std::uint64_t i = 0; i < 50; ++i) ics.push_back(sample_coefficients(model, 0, i));
  const MembraneErrorEvaluator ev(model, basis.real_modes(), ics, time_grid(0.1, 10.0));
  const Selection sel = select_on_basis(basis, CostField::uniform(model.grid_size()), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ev.mean_error(sel));
}
BENCHMARK(BM_MembraneError)->Arg(10)->Arg(55)->Unit(benchmark::kMillisecond);

}  // namespace
