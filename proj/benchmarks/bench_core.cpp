#include <benchmark/benchmark.h>

#include <array>

#include "orthomart/conditions.hpp"
#include "orthomart/decomposition.hpp"
#include "orthomart/fieldsim.hpp"
#include "orthomart/generator.hpp"
#include "orthomart/limit_suite.hpp"
#include "orthomart/orthant_table.hpp"

using namespace orthomart;

namespace {

void BM_OrthantTableBuild(benchmark::State& state) {
  const auto f = GeneratorRule::geometric({0.5, 0.5}).materialize(state.range(0));
  const std::array modes{AxisMode::at_least, AxisMode::at_most};
  for (auto _ : state) {
    OrthantTable table(f, modes);
    benchmark::DoNotOptimize(table.cell_count());
  }
  state.SetComplexityN(static_cast<std::int64_t>(f.nonzero_count()));
}
BENCHMARK(BM_OrthantTableBuild)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_HeydeTotals(benchmark::State& state) {
  const auto f = GeneratorRule::geometric({0.5, 0.5}).materialize(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(heyde_totals(f).orthant_form);
}
BENCHMARK(BM_HeydeTotals)->RangeMultiplier(2)->Range(8, 64);

void BM_Decompose(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto f = GeneratorRule::power(std::vector<double>(d, 2.0)).materialize(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f).parts.size());
  state.counters["entries"] = static_cast<double>(f.nonzero_count());
}
BENCHMARK(BM_Decompose)->Args({1, 4096})->Args({2, 32})->Args({2, 64})->Args({3, 8});

void BM_DyadicLadder(benchmark::State& state) {
  std::vector<std::int64_t> ladder;
  for (int k = 10; k <= 20; ++k) ladder.push_back(std::int64_t{1} << k);
  const auto rule = GeneratorRule::dyadic_spikes();
  for (auto _ : state) benchmark::DoNotOptimize(weighted_projection_sum(rule, ladder).partials.back());
}
BENCHMARK(BM_DyadicLadder)->Unit(benchmark::kMillisecond);

void BM_SampleInnovations(benchmark::State& state) {
  const auto side = state.range(0);
  const Box box{MultiIndex{0, 0}, MultiIndex{side - 1, side - 1}};
  const auto law = static_cast<InnovationLaw>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sample_innovations({law, 1}, box, 7).values.data());
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_SampleInnovations)
    ->Args({256, static_cast<int>(InnovationLaw::rademacher)})
    ->Args({256, static_cast<int>(InnovationLaw::gaussian)})
    ->Args({256, static_cast<int>(InnovationLaw::uniform)});

void BM_PartialSums(benchmark::State& state) {
  const auto f = CoefficientField::delta(MultiIndex{0, 0}) + CoefficientField::delta(MultiIndex{1, 1}, 0.5);
  const auto side = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        partial_sums(f, {InnovationLaw::gaussian, 1}, MultiIndex{side, side}, 64, 11).size());
  }
  state.SetItemsProcessed(state.iterations() * 64 * side * side);
}
BENCHMARK(BM_PartialSums)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TiltedTail(benchmark::State& state) {
  const std::vector<double> w(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tilted_tail(w, InnovationLaw::gaussian, static_cast<double>(w.size()), 2000, 3).log_probability);
  }
}
BENCHMARK(BM_TiltedTail)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
