// Parallel kernels against the serial reference. Thread count follows
// LRLATTICE_THREADS (default: OpenMP's choice).

#include <benchmark/benchmark.h>

#include <random>

#include "lrlattice/harmonic.hpp"
#include "lrlattice/lattice.hpp"
#include "lrlattice/parallel.hpp"
#include "lrlattice/serial.hpp"

using namespace lrl;

namespace {

const HarmonicParameters kChain{1.0, {1.0}};
const HarmonicParameters kPlane{1.0, {1.0, 1.0}};

Field random_label(const LatticeGeometry& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (auto& v : f.values()) v = cplx(u(rng), u(rng));
  return f;
}

void grid_sums_parallel(benchmark::State& st) {
  const int window = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernel_grid_sums(kPlane, 1.0, window, 128));
}
void grid_sums_serial(benchmark::State& st) {
  const int window = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(serial::kernel_grid_sums(kPlane, 1.0, window, 128));
}

void convolution_parallel(benchmark::State& st) {
  const auto kernels = make_propagator_kernels(kPlane, 1.0, static_cast<int>(st.range(0)));
  const Field f = random_label(LatticeGeometry::infinite(2, 16), 1);
  for (auto _ : st) benchmark::DoNotOptimize(apply_convolution(f, kernels));
}
void convolution_serial(benchmark::State& st) {
  const auto kernels = make_propagator_kernels(kPlane, 1.0, static_cast<int>(st.range(0)));
  const Field f = random_label(LatticeGeometry::infinite(2, 16), 1);
  for (auto _ : st) benchmark::DoNotOptimize(serial::apply_convolution(f, kernels));
}

void torus_parallel(benchmark::State& st) {
  const Field f = random_label(LatticeGeometry::torus(1, static_cast<int>(st.range(0))), 2);
  for (auto _ : st) benchmark::DoNotOptimize(apply_propagator_torus(f, kChain, 1.0));
}
void torus_serial(benchmark::State& st) {
  const Field f = random_label(LatticeGeometry::torus(1, static_cast<int>(st.range(0))), 2);
  for (auto _ : st) benchmark::DoNotOptimize(serial::apply_propagator_torus(f, kChain, 1.0));
}

void conv_constant_parallel(benchmark::State& st) {
  const DecayProfile prof(2, 1.0, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(convolution_constant(prof, static_cast<int>(st.range(0))));
}
void conv_constant_serial(benchmark::State& st) {
  const DecayProfile prof(2, 1.0, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(serial::convolution_constant(prof, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(grid_sums_parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(grid_sums_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(convolution_parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(convolution_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(torus_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(torus_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(conv_constant_parallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(conv_constant_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
