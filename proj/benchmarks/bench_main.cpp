#include <benchmark/benchmark.h>

#include "ggk/constructions.hpp"
#include "ggk/spectral.hpp"
#include "ggk/suite.hpp"
#include "ggk/walk.hpp"

using namespace ggk;

namespace {

void bm_convolve_pair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = pair_full(n);
  const auto k = uniform_field<Rat>(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(convolve(k, k));
  }
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(bm_convolve_pair)->Arg(4)->Arg(8)->Arg(16)->Complexity();

void bm_operator_norm_pair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = kernel_to_double(uniform_field<Rat>(pair_full(n)));
  for (auto _ : state) {
    MarkovOperator<double> op(k);
    benchmark::DoNotOptimize(operator_norm(op).value);
  }
}
BENCHMARK(bm_operator_norm_pair)->Arg(8)->Arg(16)->Arg(32);

void bm_return_sequence(benchmark::State& state) {
  const auto g = build_group_groupoid(GroupTable::cyclic(12));
  Kernel<Rat> k(g, SparseArrowMap<Rat>::from_unsorted(
                       {{0, rat(1, 2)}, {1, rat(1, 4)}, {11, rat(1, 4)}}));
  const auto kd = kernel_to_double(k);
  const auto full = full_unit_set(*g);
  SpectralOptions opts;
  opts.n_max = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(e_spectral_radius(kd, full, opts).rho_extrapolated);
  }
}
BENCHMARK(bm_return_sequence)->Arg(16)->Arg(64);

void bm_walk_samples(benchmark::State& state) {
  const auto g = pair_full(4);
  const auto k = kernel_to_double(uniform_field<Rat>(g));
  const auto full = full_unit_set(*g);
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_return(k, full, 8, samples, 99, 1).p_hat);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples));
}
BENCHMARK(bm_walk_samples)->Arg(1 << 12)->Arg(1 << 15);

void bm_free_ball(benchmark::State& state) {
  const auto radius = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_group_ball(2, radius).norm.value);
  }
}
BENCHMARK(bm_free_ball)->Arg(6)->Arg(8)->Arg(10);

void bm_random_suite(benchmark::State& state) {
  SuiteOptions opts;
  opts.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(random_suite(opts).size());
  }
}
BENCHMARK(bm_random_suite)->Arg(50)->Arg(200);

} // namespace

BENCHMARK_MAIN();
