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

#ifndef HOMODYNE_RANDOM_H_
#define HOMODYNE_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace homodyne {

// Seed splitting scheme.
//
// Every stochastic step draws from a substream identified by a 64-bit
// counter. The substream seed is
//
//   substream_seed(master, id) = splitmix64(master ^ splitmix64(id + 1))
//
// and the substream generator is std::mt19937_64 seeded with that value.
// Work that is split into chunks uses `derive_stream(stream, chunk)` so
// output is independent of how chunks are scheduled on threads.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream_id);

// Named stream ids for the pipelines. Values are part of the reproducibility
// contract and must not be renumbered.
enum class Stream : std::uint64_t {
  kQuadratureSamples = 1,
  kPhaseSchedule = 2,
  kTraceNoise = 3,
  kVarianceNoise = 4,
  kScanTiming = 5,
  kLinearityNoise = 6,
  kMonteCarlo = 7,
};

std::uint64_t derive_stream(std::uint64_t master, Stream stream,
                            std::uint64_t chunk = 0);

// Thin wrapper over mt19937_64 with distribution code that does not depend
// on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal by Box-Muller; the paired value is cached.
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Runs body(chunk) for chunk in [0, n_chunks) on up to `threads` threads.
// Chunks are claimed in order; the caller is responsible for writing results
// into chunk-indexed slots so the outcome does not depend on scheduling.
void parallel_for_chunks(std::size_t n_chunks, int threads,
                         const std::function<void(std::size_t)>& body);

}  // namespace homodyne

#endif  // HOMODYNE_RANDOM_H_
