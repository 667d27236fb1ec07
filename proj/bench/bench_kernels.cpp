// Serial reference kernels against their OpenMP counterparts.
// Arg(0) runs the serial kernel, Arg(1) the OpenMP one.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spherecover/kernels.hpp"

using namespace spherecover;
using namespace spherecover::kernels;

namespace {

void BM_UncoveredProbability(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto rho = DistortionMatrix::hamming(3);
  const std::vector<double> lp{std::log(0.5), std::log(0.3), std::log(0.2)};
  std::mt19937_64 rng(3);
  std::vector<Symbol> words(32 * n);
  for (auto& s : words) s = static_cast<Symbol>(rng() % 3);
  const CoverInstance inst{n, lp, &rho, words, 0.3 * static_cast<double>(n)};
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? uncovered_probability_omp(inst) : uncovered_probability_serial(inst));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(power_count(3, n)));
}
BENCHMARK(BM_UncoveredProbability)->ArgsProduct({{0, 1}, {9, 11}})->Unit(benchmark::kMillisecond);

void BM_ChannelMesh(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto rho = DistortionMatrix::hamming(2);
  const std::vector<double> source{0.6, 0.4}, log_mass{std::log(0.6), std::log(0.4)};
  const ChannelMeshInstance inst{source, &rho, log_mass, 0.3, static_cast<std::size_t>(state.range(1))};
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? channel_mesh_min_omp(inst) : channel_mesh_min_serial(inst));
}
BENCHMARK(BM_ChannelMesh)->ArgsProduct({{0, 1}, {200, 800}})->Unit(benchmark::kMillisecond);

void BM_SubsetSearch(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto candidates = static_cast<std::size_t>(state.range(1));
  const std::size_t atoms = 256, words = atoms / 64;
  std::mt19937_64 rng(8);
  std::vector<std::uint64_t> coverage(candidates * words);
  for (auto& w : coverage) w = rng() & rng();
  std::vector<double> mass(candidates), prob(atoms);
  for (auto& m : mass) m = 0.5 + static_cast<double>(rng() % 100) / 100.0;
  double total = 0.0;
  for (auto& a : prob) total += a = static_cast<double>(rng() % 1000 + 1);
  for (auto& a : prob) a /= total;
  const SubsetInstance inst{words, coverage, mass, 4.0, prob};
  for (auto _ : state) benchmark::DoNotOptimize(parallel ? subset_min_omp(inst) : subset_min_serial(inst));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << candidates));
}
BENCHMARK(BM_SubsetSearch)->ArgsProduct({{0, 1}, {16, 20}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
