// Copyright 2026 The Homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "homodyne/detector.h"
#include "homodyne/fock_state.h"
#include "homodyne/povm.h"
#include "homodyne/quadrature.h"
#include "homodyne/random.h"
#include "homodyne/tomography.h"
#include "homodyne/wigner.h"

namespace homodyne {
namespace {

DensityMatrix test_state(int cutoff) {
  return lossy_squeezed_vacuum(FockDim(cutoff), SqueezeParams(0.375, 0.0), 0.28);
}

HomodynePovm test_povm(int cutoff) {
  return build_povm(FockDim(cutoff), default_bin_edges(1.2), uniform_phases(60));
}

void BM_BuildPovm(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(test_povm(cutoff));
}
BENCHMARK(BM_BuildPovm)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SampleQuadratures(benchmark::State& state) {
  const auto rho = test_state(30);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_quadratures(rho, PhaseSchedule::uniform(), n, derive_stream(1, Stream::kQuadratureSamples)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleQuadratures)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_MleReconstruct(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const auto povm = test_povm(cutoff);
  const auto samples = sample_quadratures(test_state(30), PhaseSchedule::uniform(), 1000000,
                                          derive_stream(2, Stream::kQuadratureSamples));
  const auto data = bin_samples(samples, povm);
  MleOptions options;
  options.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto report = mle_reconstruct(data, povm, options);
    state.counters["iterations"] = report.iterations;
  }
}
BENCHMARK(BM_MleReconstruct)->Args({6, 1})->Args({6, 4})->Args({10, 1})->Unit(benchmark::kMillisecond);

void BM_WignerGrid(benchmark::State& state) {
  const auto rho = test_state(static_cast<int>(state.range(0)));
  WignerGridSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(wigner(rho, spec));
}
BENCHMARK(BM_WignerGrid)->Arg(6)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FitButterworth(benchmark::State& state) {
  const DetectorSpec spec;
  const auto freq = linear_grid(1e7, 1e10, 1000);
  const auto vacuum = [](double) { return 1.0; };
  const auto dark = simulate_output_spectrum(spec, 0.0, freq, vacuum);
  const auto shot = simulate_output_spectrum(spec, spec.reference_lo_power_mw, freq, vacuum);
  for (auto _ : state) benchmark::DoNotOptimize(fit_butterworth(shot, dark));
}
BENCHMARK(BM_FitButterworth)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace homodyne

BENCHMARK_MAIN();
