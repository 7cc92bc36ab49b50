// OpenMP kernels against their serial reference versions on a
// 256 x 256 x 244 grid.

#include <benchmark/benchmark.h>

#include <vector>

#include "lungcover/kernels.hpp"
#include "lungcover/rng.hpp"

namespace k = lungcover::kernels;
namespace ref = lungcover::kernels::reference;

namespace {

constexpr std::size_t nx = 256, ny = 256, nz = 244, n = nx * ny * nz;

const std::vector<std::uint8_t>& bits(std::uint64_t seed) {
  static std::vector<std::uint8_t> a, b;
  auto& v = seed == 1 ? a : b;
  if (v.empty()) {
    lungcover::Rng rng(seed);
    v.resize(n);
    for (auto& x : v) x = rng.uniform() < 0.3;
  }
  return v;
}

const std::vector<std::int16_t>& values() {
  static std::vector<std::int16_t> v;
  if (v.empty()) {
    lungcover::Rng rng(3);
    v.resize(n);
    for (auto& x : v) x = static_cast<std::int16_t>(-1000 + static_cast<int>(rng.below(1200)));
  }
  return v;
}

template <auto Fn>
void count_and(benchmark::State& state) {
  const auto& a = bits(1);
  const auto& b = bits(2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n));
}

template <auto Fn>
void and_not(benchmark::State& state) {
  const auto& a = bits(1);
  const auto& b = bits(2);
  std::vector<std::uint8_t> out(n);
  for (auto _ : state) {
    Fn(a, b, out);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 3 * n));
}

template <auto Fn>
void render(benchmark::State& state) {
  const auto& v = values();
  std::vector<std::uint8_t> out(nx * nz);
  for (auto _ : state) {
    Fn(v, nx, ny, nz, -1000.0, 200.0, out);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n));
}

template <auto Fn>
void project(benchmark::State& state) {
  const auto& a = bits(1);
  std::vector<std::uint8_t> out(nx * nz);
  for (auto _ : state) {
    Fn(a, nx, ny, nz, out);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <auto Fn>
void extrude(benchmark::State& state) {
  const auto& a = bits(1);
  std::vector<std::uint8_t> plane(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(nx * nz));
  std::vector<std::uint8_t> out(n);
  for (auto _ : state) {
    Fn(plane, nx, ny, nz, out);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(count_and<k::count_and>)->Name("count_and/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(count_and<ref::count_and>)->Name("count_and/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(and_not<k::and_not_into>)->Name("and_not_into/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(and_not<ref::and_not_into>)->Name("and_not_into/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(render<k::render_columns>)->Name("render_columns/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(render<ref::render_columns>)->Name("render_columns/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(project<k::project_columns>)->Name("project_columns/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(project<ref::project_columns>)->Name("project_columns/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(extrude<k::extrude_columns>)->Name("extrude_columns/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(extrude<ref::extrude_columns>)->Name("extrude_columns/reference")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
