// Copyright (c) 2026 The pardec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PARDEC_RNG_H_
#define PARDEC_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "pardec/types.h"

namespace pardec {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stateless uniform in [0, 1) from a 64-bit key.
inline double HashUniform(uint64_t key) {
  return static_cast<double>(SplitMix64(key) >> 11) * 0x1.0p-53;
}

// Seeded generator whose children are derived by name, so adding a stream
// never perturbs the others. Distributions are computed by hand because the
// standard ones are not bit-stable across library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(SplitMix64(seed)) {}

  uint64_t seed() const { return seed_; }

  Rng Split(std::string_view name) const {
    uint64_t h = kFnvOffset;
    for (unsigned char c : name) {
      h ^= c;
      h *= kFnvPrime;
    }
    return Rng(SplitMix64(seed_ ^ SplitMix64(h)));
  }
  Rng Split(uint64_t index) const {
    return Rng(SplitMix64(seed_ ^ SplitMix64(index + 0x51ed2701ULL)));
  }

  uint64_t NextU64() { return engine_(); }

  // [0, 1)
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Inclusive range.
  int UniformInt(int lo, int hi) {
    const auto span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(NextU64() % span);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pardec

#endif  // PARDEC_RNG_H_
